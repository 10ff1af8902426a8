#include "ggibbs/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace ggibbs {

namespace {

Json site_json(const Site& s, int dim) {
  Json a = Json::array();
  for (int k = 0; k < dim; ++k) a.push_back(s[k]);
  return a;
}

Site site_from(const Json& j) {
  Site s{};
  int k = 0;
  for (const auto& v : j) s[k++] = v.get<int>();
  return s;
}

}  // namespace

Json to_json(const Window& w) {
  Json j;
  j["dimension"] = w.dim();
  j["lo"] = site_json(w.lo(), w.dim());
  j["hi"] = site_json(w.hi(), w.dim());
  return j;
}

Window window_from_json(const Json& j) {
  int dim = j.at("dimension").get<int>();
  return Window(dim, site_from(j.at("lo")), site_from(j.at("hi")));
}

Json to_json(const SpinAlphabet& a) {
  Json j;
  j["symbols"] = a.symbols;
  j["plus"] = a.plus_symbol;
  return j;
}

SpinAlphabet alphabet_from_json(const Json& j) {
  SpinAlphabet a;
  a.symbols = j.at("symbols").get<std::vector<std::string>>();
  a.plus_symbol = j.at("plus").get<int>();
  a.validate();
  return a;
}

Json to_json(const Exterior& e, int dim) {
  Json j;
  if (e.kind == Exterior::Kind::Constant) {
    j["kind"] = "constant";
    j["symbol"] = e.constant;
  } else {
    j["kind"] = "lex_split";
    j["cut"] = site_json(e.cut, dim);
    j["below"] = e.below;
    j["above"] = e.above;
  }
  return j;
}

Exterior exterior_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return Exterior::constant_rule(j.at("symbol").get<int>());
  if (kind == "lex_split")
    return Exterior::lex_split(site_from(j.at("cut")), j.at("below").get<int>(),
                               j.at("above").get<int>());
  throw std::invalid_argument("exterior: unknown kind " + kind);
}

Json to_json(const Configuration& c) {
  Json j;
  j["dimension"] = c.window().dim();
  j["lo"] = site_json(c.window().lo(), c.window().dim());
  j["hi"] = site_json(c.window().hi(), c.window().dim());
  j["alphabet"] = to_json(c.alphabet());
  j["values"] = c.values();
  j["exterior"] = to_json(c.exterior(), c.window().dim());
  return j;
}

Configuration configuration_from_json(const Json& j) {
  int dim = j.at("dimension").get<int>();
  Window w(dim, site_from(j.at("lo")), site_from(j.at("hi")));
  return Configuration(w, alphabet_from_json(j.at("alphabet")),
                       j.at("values").get<std::vector<std::uint8_t>>(),
                       exterior_from_json(j.at("exterior")));
}

Json to_json(const Potential& p) {
  Json j;
  j["kind"] =
      p.kind() == Potential::Kind::TranslationInvariant ? "translation_invariant" : "quenched";
  j["q"] = p.q();
  j["dimension"] = p.dim();
  j["range"] = p.range();
  Json terms = Json::array();
  for (const auto& t : p.ti_terms()) {
    Json tj;
    Json sites = Json::array();
    for (const auto& s : t.shape.sites) sites.push_back(site_json(s, p.dim()));
    tj["sites"] = sites;
    tj["table"] = t.table;
    terms.push_back(tj);
  }
  j["terms"] = terms;
  Json anchored = Json::array();
  for (const auto& a : p.anchored_terms()) {
    Json tj;
    tj["anchor"] = site_json(a.anchor, p.dim());
    Json sites = Json::array();
    for (const auto& s : a.term.shape.sites) sites.push_back(site_json(s, p.dim()));
    tj["sites"] = sites;
    tj["table"] = a.term.table;
    anchored.push_back(tj);
  }
  j["anchored"] = anchored;
  return j;
}

Potential potential_from_json(const Json& j) {
  Potential p(j.at("q").get<int>(), j.at("dimension").get<int>());
  for (const auto& tj : j.at("terms")) {
    std::vector<Site> sites;
    for (const auto& sj : tj.at("sites")) sites.push_back(site_from(sj));
    p.add_ti_term(std::move(sites), tj.at("table").get<std::vector<double>>());
  }
  for (const auto& tj : j.at("anchored")) {
    std::vector<Site> sites;
    for (const auto& sj : tj.at("sites")) sites.push_back(site_from(sj));
    p.add_anchored_term(site_from(tj.at("anchor")), std::move(sites),
                        tj.at("table").get<std::vector<double>>());
  }
  return p;
}

Json to_json(const ExactMeasure& m) {
  Json j;
  j["window"] = to_json(m.window());
  j["q"] = m.q();
  j["probs"] = m.probs();
  return j;
}

Json to_json(const EntropyEstimate& e) {
  Json j;
  j["method"] = e.method;
  Json pts = Json::array();
  for (const auto& [n, v] : e.points) {
    Json p;
    p["n"] = n;
    p["value"] = v;
    pts.push_back(p);
  }
  j["points"] = pts;
  j["infinite"] = e.infinite;
  if (!e.infinite) {
    j["density"] = e.density;
    j["bracket"] = {e.bracket_lo, e.bracket_hi};
  }
  if (e.mc_error > 0) j["mc_error"] = e.mc_error;
  return j;
}

void write_sample_set(const SampleSet& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  Json header;
  header["record"] = "header";
  header["window"] = to_json(s.window);
  header["q"] = s.q;
  header["sampler"] = s.sampler_id;
  header["seed"] = s.seed;
  header["sweeps"] = s.sweeps;
  header["burn_in"] = s.burn_in;
  header["samples"] = s.samples.size();
  out << header.dump() << "\n";
  for (const auto& sample : s.samples) {
    Json rec;
    rec["values"] = sample;
    out << rec.dump() << "\n";
  }
}

SampleSet read_sample_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty sample file");
  Json header = Json::parse(line);
  SampleSet s;
  s.window = window_from_json(header.at("window"));
  s.q = header.at("q").get<int>();
  s.sampler_id = header.at("sampler").get<std::string>();
  s.seed = header.at("seed").get<std::uint64_t>();
  s.sweeps = header.at("sweeps").get<int>();
  s.burn_in = header.at("burn_in").get<int>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json rec = Json::parse(line);
    s.samples.push_back(rec.at("values").get<std::vector<std::uint8_t>>());
  }
  return s;
}

void write_json_file(const Json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace ggibbs

#include "ggibbs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ggibbs/disorder.hpp"
#include "ggibbs/entropy.hpp"
#include "ggibbs/measure.hpp"
#include "ggibbs/parallel.hpp"
#include "ggibbs/potential.hpp"
#include "ggibbs/rng.hpp"
#include "ggibbs/specification.hpp"
#include "ggibbs/transfer.hpp"
#include "ggibbs/version.hpp"

namespace ggibbs {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kExperiments = {
    "check-spec", "vp-1d",      "vp-product", "grising",    "decimate",
    "rfim-joint", "ad-check",   "corr-decay", "oscillation"};

bool needs_seed(const std::string& e) {
  return e == "grising" || e == "corr-decay" || e == "oscillation" || e == "rfim-joint";
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << header << "\n";
  for (const auto& r : rows) out << r << "\n";
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string label(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

ChainFamily ising_chain_family(double beta) {
  return ChainFamily(TransferChain::from_potential(ising_potential(1, beta, 0.0)), "ising");
}

// ---------------------------------------------------------------- check-spec

Json run_check_spec(const Json& cfg) {
  const double beta = cfg.at("params").at("beta").get<double>();
  const double h = cfg.at("params").at("h").get<double>();
  auto phi = ising_potential(1, beta, h);

  // properness over random boundaries and exterior events
  double properness = 0.0;
  {
    Window vol = Window::interval(0, 1);
    Window amb = Window::interval(-2, 3);
    CounterRng rng(2);
    std::vector<Configuration> boundaries;
    for (int i = 0; i < 12; ++i) {
      std::vector<std::uint8_t> v(static_cast<std::size_t>(amb.site_count()));
      for (auto& x : v) x = static_cast<std::uint8_t>(rng.uniform_int(2));
      boundaries.emplace_back(amb, SpinAlphabet::ising(), v, Exterior::constant_rule(1));
    }
    std::vector<CylinderEvent> events = {CylinderEvent{{site1(-1)}, {1}},
                                         CylinderEvent{{site1(-2), site1(2)}, {0, 1}},
                                         CylinderEvent{{site1(3)}, {0}}};
    properness = check_proper(gibbs_full_kernel(phi), vol, boundaries, events);
  }

  // consistency, exhaustive boundaries: 1D outer windows up to 4 sites
  double cons1d = 0.0;
  std::int64_t cases = 0;
  for (int len = 1; len <= 4; ++len) {
    Window outer = Window::interval(0, len - 1);
    Window amb = outer.expanded(1);
    for (std::int64_t bs = 0; bs < state_count(2, amb.site_count()); ++bs) {
      std::vector<std::uint8_t> bv(static_cast<std::size_t>(amb.site_count()));
      decode_state(bs, 2, amb.site_count(), bv.data());
      Configuration omega(amb, SpinAlphabet::ising(), bv, Exterior::constant_rule(1));
      for (int a = 0; a < len; ++a)
        for (int b = a; b < len; ++b) {
          cons1d = std::max(cons1d, check_consistent(phi, Window::interval(a, b), outer, omega));
          ++cases;
        }
    }
  }

  // 2D 2x2 outer window; the kernels read the boundary on the 12-site annulus
  double cons2d = 0.0;
  auto phi2 = ising_potential(2, beta, h);
  {
    Window outer = Window::box2(0, 0, 1, 1);
    Window amb = outer.expanded(1);
    auto annulus = amb.sites_outside(outer);
    std::vector<Window> inners;
    for (int ax = 0; ax <= 1; ++ax)
      for (int ay = 0; ay <= 1; ++ay)
        for (int bx = ax; bx <= 1; ++bx)
          for (int by = ay; by <= 1; ++by) inners.push_back(Window::box2(ax, ay, bx, by));
    const std::int64_t nann = static_cast<std::int64_t>(annulus.size());
    std::vector<double> worst(static_cast<std::size_t>(state_count(2, nann)), 0.0);
    par::for_each_index(state_count(2, nann), [&](std::int64_t bs) {
      std::vector<std::uint8_t> bv(static_cast<std::size_t>(nann));
      decode_state(bs, 2, nann, bv.data());
      Configuration omega = Configuration::constant(amb, SpinAlphabet::ising(), 1);
      for (std::int64_t i = 0; i < nann; ++i)
        omega.set_value(annulus[static_cast<std::size_t>(i)], bv[static_cast<std::size_t>(i)]);
      double w = 0.0;
      for (const Window& inner : inners) w = std::max(w, check_consistent(phi2, inner, outer, omega));
      worst[static_cast<std::size_t>(bs)] = w;
    });
    for (double w : worst) cons2d = std::max(cons2d, w);
    cases += static_cast<std::int64_t>(worst.size() * inners.size());
  }

  Json res;
  res["max_properness_deviation"] = properness;
  res["max_consistency_deviation_1d"] = cons1d;
  res["max_consistency_deviation_2d"] = cons2d;
  res["cases"] = cases;
  res["pass"] = properness == 0.0 && cons1d <= 1e-12 && cons2d <= 1e-12;
  return res;
}

// --------------------------------------------------------------------- vp-1d

Json run_vp_1d(const Json& cfg, const std::string& out_dir, const std::string& csv_name) {
  const auto betas = cfg.at("params").at("betas").get<std::vector<double>>();
  const auto schedule = cfg.at("schedule").get<std::vector<int>>();
  Json rows = Json::array();
  std::vector<std::string> csv;
  for (double bmu : betas)
    for (double bnu : betas) {
      auto mu = ising_chain_family(bmu);
      auto nu = ising_chain_family(bnu);
      auto direct = relative_entropy_density(mu, nu, schedule);
      auto phi_nu = ising_potential(1, bnu, 0.0);
      auto ep = e_plus(nu, schedule);
      auto sul = sullivan_density(phi_nu, mu, ep, schedule);
      auto pratio = pressure_ratio_check(mu, nu, schedule);
      double diff = std::abs(direct.density - sul.value);
      Json row;
      row["beta_mu"] = bmu;
      row["beta_nu"] = bnu;
      row["direct_density"] = direct.density;
      row["sullivan_density"] = sul.value;
      row["abs_diff"] = diff;
      row["e_plus"] = sul.e_plus_term;
      row["ks"] = sul.ks_term;
      row["d_avg"] = sul.d_term;
      row["pressure_ratio"] = pratio.density;  // condition C2 probe
      row["direct_estimate"] = to_json(direct);
      row["tier"] = direct.method;
      rows.push_back(row);
      csv.push_back(fmt(bmu) + "," + fmt(bnu) + "," + fmt(direct.density) + "," +
                    fmt(sul.value) + "," + fmt(diff));
    }
  write_csv((fs::path(out_dir) / csv_name).string(),
            "beta_mu,beta_nu,direct_density,sullivan_density,abs_diff", csv);
  Json res;
  res["rows"] = rows;
  return res;
}

// ---------------------------------------------------------------- vp-product

Json run_vp_product(const Json& cfg) {
  const double p = cfg.at("params").at("p").get<double>();
  const double q = cfg.at("params").at("q").get<double>();
  const auto schedule = cfg.at("schedule").get<std::vector<int>>();
  Json rows = Json::array();
  auto add = [&](const std::string& name, double got, double want, const std::string& tier) {
    Json row;
    row["name"] = name;
    row["computed"] = got;
    row["expected"] = want;
    row["abs_diff"] = std::abs(got - want);
    row["tier"] = tier;
    rows.push_back(row);
  };

  ProductFamily mup({1 - p, p}), nuq({1 - q, q});
  auto kl = relative_entropy_density(mup, nuq, schedule);
  add("kl_density(bernoulli)", kl.density,
      p * std::log(p / q) + (1 - p) * std::log((1 - p) / (1 - q)), kl.method);
  auto ks = ks_entropy(mup, schedule);
  add("ks(bernoulli)", ks.density, -p * std::log(p) - (1 - p) * std::log(1 - p), ks.method);
  auto ep = e_plus(mup, schedule);
  add("e_plus(bernoulli)", ep.density, -std::log(p), ep.method);
  auto el = e_lambda(mup, nuq, schedule);
  add("e_lambda(cross)", el.density, -q * std::log(p) - (1 - q) * std::log(1 - p), el.method);

  for (double beta : {0.0, 0.3, 0.6, 1.0}) {
    auto fam = ising_chain_family(beta);
    auto e = e_plus(fam, schedule);
    add("e_plus(ising," + label(beta) + ")", e.density, std::log(2 * std::cosh(beta)) - beta,
        e.method);
    auto k = ks_entropy(fam, schedule);
    add("ks(ising," + label(beta) + ")", k.density,
        std::log(2 * std::cosh(beta)) - beta * std::tanh(beta), k.method);
  }
  Json res;
  res["rows"] = rows;
  return res;
}

// ------------------------------------------------------------------- grising

Json run_grising(const Json& cfg, const std::string& out_dir, const std::string& csv_name) {
  const double p = cfg.at("params").at("p").get<double>();
  const double beta = cfg.at("params").at("beta").get<double>();
  const int replicas = cfg.at("params").at("replicas").get<int>();
  const auto schedule = cfg.at("schedule").get<std::vector<int>>();
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

  Json rows = Json::array();
  std::vector<std::string> csv;
  SampleSet samples;
  bool first = true;
  for (int side : schedule) {
    Window w = Window::box2(0, 0, side - 1, side - 1);
    double rate = grising_zero_block_rate(p, w);
    double zero_frac = 0.0, touch = 0.0;
    for (int r = 0; r < replicas; ++r) {
      auto g = grising_sample(p, beta, w,
                              CounterRng::derive(seed, static_cast<std::uint64_t>(side * 1000 + r)));
      double zeros = 0.0;
      for (std::int64_t i = 0; i < w.site_count(); ++i) zeros += g.xi.value_index(i) == 1;
      zero_frac += zeros / static_cast<double>(w.site_count());
      touch += g.boundary_touch_fraction;
      if (first) {
        if (samples.samples.empty()) {
          samples.window = w;
          samples.q = 3;
          samples.sampler_id = std::string("grising/") + CounterRng::name();
          samples.seed = seed;
          samples.sweeps = 1;
          samples.burn_in = 0;
        }
        samples.samples.push_back(g.xi.values());
      }
    }
    first = false;
    zero_frac /= replicas;
    touch /= replicas;
    Json row;
    row["side"] = side;
    row["sites"] = w.site_count();
    row["zero_block_rate"] = rate;
    row["log_one_minus_p"] = std::log(1 - p);
    row["abs_dev"] = std::abs(rate - std::log(1 - p));
    row["mc_zero_fraction"] = zero_frac;
    row["mc_boundary_touch_fraction"] = touch;
    row["tier"] = "Exact+MC";
    rows.push_back(row);
    csv.push_back(std::to_string(side) + "," + fmt(rate) + "," + fmt(std::log(1 - p)) + "," +
                  fmt(std::abs(rate - std::log(1 - p))));
  }
  write_csv((fs::path(out_dir) / csv_name).string(), "side,zero_block_rate,log_one_minus_p,abs_dev",
            csv);
  write_sample_set(samples, (fs::path(out_dir) / "grising_samples.jsonl").string());
  Json res;
  res["rows"] = rows;
  res["sample_file"] = "grising_samples.jsonl";
  return res;
}

// ------------------------------------------------------------------ decimate

Json run_decimate(const Json& cfg, const std::string& out_dir, const std::string& csv_name) {
  const double beta = cfg.at("params").at("beta").get<double>();
  const int b = cfg.at("params").at("b").get<int>();
  const auto schedule = cfg.at("schedule").get<std::vector<int>>();

  auto chain = TransferChain::from_potential(ising_potential(1, beta, 0.0));
  double bp = std::atanh(std::pow(std::tanh(beta), b));
  auto renorm = TransferChain::from_potential(ising_potential(1, bp, 0.0));

  Json rows = Json::array();
  std::vector<std::string> csv;
  for (int n : schedule) {
    auto dec = decimate(chain.marginal(b * (n - 1) + 1), b);
    auto want = renorm.marginal(n);
    double dev = 0.0;
    for (std::int64_t s = 0; s < want.n_states(); ++s)
      dev = std::max(dev, std::abs(dec.prob(s) - want.prob(s)));
    Json row;
    row["n"] = n;
    row["beta"] = beta;
    row["beta_renormalized"] = bp;
    row["max_abs_dev"] = dev;
    row["tier"] = "Transfer";
    rows.push_back(row);
    csv.push_back(std::to_string(n) + "," + fmt(bp) + "," + fmt(dev));
  }
  write_csv((fs::path(out_dir) / csv_name).string(), "n,beta_renormalized,max_abs_dev", csv);

  // 2D sandwich report: decimated minus phase below decimated plus phase
  Json sandwich;
  {
    const double b2 = cfg.at("params").at("beta_2d").get<double>();
    auto phi2 = ising_potential(2, b2, 0.0);
    Window w = Window::box2(0, 0, 2, 2);
    auto plus = finite_gibbs(phi2, w, Boundary::constant(w, SpinAlphabet::ising(), 1));
    auto minus = finite_gibbs(phi2, w, Boundary::constant(w, SpinAlphabet::ising(), 0));
    auto dplus = decimate(plus, 2);
    auto dminus = decimate(minus, 2);
    auto ok = stochastic_domination_check(dminus, dplus);
    auto rev = stochastic_domination_check(dplus, dminus);
    sandwich["beta"] = b2;
    sandwich["window"] = "3x3 -> 2x2, b=2";
    sandwich["violation_minus_below_plus"] = ok.worst_violation;
    sandwich["violation_plus_below_minus"] = rev.worst_violation;
    sandwich["functions_tested"] = ok.functions_tested;
    sandwich["exhaustive"] = ok.exhaustive;
  }
  Json res;
  res["rows"] = rows;
  res["sandwich_2d"] = sandwich;
  return res;
}

// ---------------------------------------------------------------- rfim-joint

Json run_rfim_joint(const Json& cfg) {
  const double beta = cfg.at("params").at("beta").get<double>();
  const double h = cfg.at("params").at("h").get<double>();
  const int nmax = cfg.at("params").at("nmax").get<int>();
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  JointModel model = rfim_model(1, beta, h);

  Json res;

  // boundary bounds along the 1D schedule plus one 2D instance
  {
    std::vector<Window> wins;
    for (int n = 1; n <= nmax; ++n) wins.push_back(Window::interval(0, n - 1));
    auto rows = joint_entropy_bound_check(model, wins, 1);
    Json jr = Json::array();
    for (const auto& r : rows) {
      Json row;
      row["sites"] = r.volume;
      row["boundary_sites"] = r.boundary;
      row["h_fv"] = r.h_fv;
      row["per_site"] = r.h_fv / static_cast<double>(r.volume);
      row["sup_log_ratio"] = r.sup_log_ratio;
      row["bound_entropy"] = r.bound_entropy;
      row["bound_log_ratio"] = r.bound_log_ratio;
      jr.push_back(row);
    }
    res["bounds_1d"] = jr;
    JointModel m2 = rfim_model(2, beta, h);
    auto rows2 = joint_entropy_bound_check(m2, {Window::box2(0, 0, 2, 2)}, 1);
    Json row2;
    row2["sites"] = rows2[0].volume;
    row2["boundary_sites"] = rows2[0].boundary;
    row2["h_fv"] = rows2[0].h_fv;
    row2["sup_log_ratio"] = rows2[0].sup_log_ratio;
    row2["bound_entropy"] = rows2[0].bound_entropy;
    row2["bound_log_ratio"] = rows2[0].bound_log_ratio;
    res["bounds_2d_3x3"] = row2;
  }

  // explicit conditional kernel vs brute-force conditioning
  {
    Json grid = Json::array();
    const std::vector<std::pair<double, double>> bh = {{0.3, 0.3}, {0.6, 0.4}, {1.0, 0.5}};
    for (auto [bb, hh] : bh) {
      JointModel m = rfim_model(1, bb, hh);
      struct Sys {
        Window ambient, volume;
        int margin;
      };
      const std::vector<Sys> systems = {{Window::interval(0, 1), Window::interval(0, 1), 0},
                                        {Window::interval(0, 2), Window::interval(1, 1), 1},
                                        {Window::interval(0, 3), Window::interval(1, 2), 1}};
      double worst = 0.0;
      CounterRng rng(seed);
      for (const auto& sys : systems) {
        auto table = joint_measure_exact(m, sys.ambient, 1, 1);
        for (int rep = 0; rep < 2; ++rep) {
          std::vector<std::uint8_t> full(static_cast<std::size_t>(sys.ambient.site_count()));
          for (auto& v : full) v = static_cast<std::uint8_t>(rng.uniform_int(4));
          Configuration xi(sys.ambient, m.joint_alphabet(), full,
                           Exterior::constant_rule(m.joint_sym(1, 1)));
          auto kernel = joint_conditional_kernel(m, sys.volume, xi, sys.margin, 1);
          // brute conditional
          const std::int64_t vs = state_count(4, sys.volume.site_count());
          std::vector<double> cond(static_cast<std::size_t>(vs), 0.0);
          double z = 0.0;
          std::vector<std::uint8_t> v = full;
          for (std::int64_t st = 0; st < vs; ++st) {
            std::uint8_t digits[16];
            decode_state(st, 4, sys.volume.site_count(), digits);
            for (std::int64_t i = 0; i < sys.volume.site_count(); ++i)
              v[static_cast<std::size_t>(sys.ambient.index_of(sys.volume.site_at(i)))] = digits[i];
            cond[static_cast<std::size_t>(st)] =
                table.prob(encode_state(4, sys.ambient.site_count(), v.data()));
            z += cond[static_cast<std::size_t>(st)];
          }
          for (std::int64_t st = 0; st < vs; ++st)
            worst = std::max(worst,
                             std::abs(cond[static_cast<std::size_t>(st)] / z - kernel.prob(st)));
        }
      }
      Json row;
      row["beta"] = bb;
      row["h"] = hh;
      row["max_abs_dev"] = worst;
      grid.push_back(row);
    }
    res["kernel_vs_brute"] = grid;
  }

  // incompatibility experiment (agreement expected in d = 1)
  {
    Json margins = Json::array();
    for (int margin : {1, 2, 3}) {
      auto rep = rfim_incompatibility(model, Window::interval(-margin, margin), margin, 1);
      Json row;
      row["margin"] = margin;
      row["k_plus_direct"] = rep.k_plus_direct;
      row["k_mixed"] = rep.k_mixed;
      row["gap"] = rep.gap;
      margins.push_back(row);
    }
    res["incompatibility_1d"] = margins;
  }

  // entropy-formula terms for K- against K+ (finite-n proxies, report only)
  {
    const int n = std::min(nmax, 6);
    Window w = Window::interval(0, n - 1);
    auto kminus = joint_measure_exact(model, w, 0, 1);
    auto kplus = joint_measure_exact(model, w, 1, 1);
    double hks = 0.0;
    for (std::int64_t s = 0; s < kminus.n_states(); ++s) {
      double pv = kminus.prob(s);
      if (pv > 0) hks -= pv * std::log(pv);
    }
    hks /= static_cast<double>(n);
    const double h_kd = std::log(2.0);  // eta marginal is the fair product law
    // K-mean of the joint energy, one translate per base shape at the centre
    double energy = 0.0;
    {
      Site c = site1(n / 2);
      std::vector<std::uint8_t> jv(static_cast<std::size_t>(n));
      for (const Term& t : model.joint.ti_terms()) {
        bool fits = true;
        for (const Site& s : t.shape.sites)
          if (!w.contains(add(s, c))) fits = false;
        if (!fits) continue;
        for (std::int64_t st = 0; st < kminus.n_states(); ++st) {
          decode_state(st, 4, n, jv.data());
          std::int64_t idx = 0, stride = 1;
          for (const Site& s : t.shape.sites) {
            idx += stride * jv[static_cast<std::size_t>(w.index_of(add(s, c)))];
            stride *= 4;
          }
          energy += kminus.prob(st) * t.table[static_cast<std::size_t>(idx)];
        }
      }
    }
    // quenched pressure proxy averaged over sampled disorder
    double pressure = 0.0;
    const int reps = 32;
    for (int r = 0; r < reps; ++r) {
      auto eta = sample_disorder(model.disorder, w.expanded(1),
                                 CounterRng::derive(seed, 500 + static_cast<std::uint64_t>(r)), 1);
      auto phi = quench(model, eta.values, w);
      pressure += log_partition(phi, w, Boundary::constant(w, SpinAlphabet::ising(), 1)) /
                  static_cast<double>(n);
    }
    pressure /= reps;
    double lhs = relative_entropy_fv(kminus, kplus).value / static_cast<double>(n);
    Json terms;
    terms["window"] = n;
    terms["h_marginal_vs_law"] = 0.0;  // construction: the eta marginal is the law
    terms["ks_joint"] = hks;
    terms["ks_disorder"] = h_kd;
    terms["joint_energy_mean"] = energy;
    terms["quenched_pressure_proxy"] = pressure;
    terms["pressure_replicas"] = reps;
    terms["assembled"] = 0.0 - hks + h_kd + energy + pressure;
    terms["h_fv_per_site"] = lhs;
    res["entropy_formula_terms"] = terms;
  }
  return res;
}

// ------------------------------------------------------------------ ad-check

Json run_ad_check(const Json& cfg, const std::string& out_dir, const std::string& csv_name) {
  const std::uint64_t seed = cfg.value("seed", 7ULL);
  Json rows = Json::array();
  std::vector<std::string> csv;
  auto push = [&](const AdRow& r) {
    Json row;
    row["family"] = r.family;
    row["block_len"] = r.block_len;
    row["gap"] = r.gap;
    row["min_log_ratio"] = r.min_log_ratio;
    row["max_log_ratio"] = r.max_log_ratio;
    row["c_n"] = r.c_n;
    row["envelope"] = r.envelope;
    row["pairs"] = r.pairs;
    row["skipped"] = r.skipped;
    row["tier"] = "Exact";
    row["within"] = r.max_log_ratio <= r.envelope + 1e-12 &&
                    -r.min_log_ratio <= r.envelope + 1e-12;
    rows.push_back(row);
    csv.push_back(r.family + "," + std::to_string(r.block_len) + "," + std::to_string(r.gap) +
                  "," + fmt(r.min_log_ratio) + "," + fmt(r.max_log_ratio) + "," + fmt(r.c_n) +
                  "," + fmt(r.envelope));
  };

  push(ad_check_product({0.35, 0.65}, 3, 2, seed));
  auto chain = TransferChain::from_potential(
      ising_potential(1, cfg.at("params").at("beta").get<double>(), 0.0));
  for (int gap : {1, 2, 4}) push(ad_check_chain(chain, 3, gap, seed));
  JointModel m = rfim_model(1, cfg.at("params").at("beta").get<double>(),
                            cfg.at("params").at("h").get<double>());
  push(ad_check_joint(m, 6, 2, 1, 1, 1, seed));

  write_csv((fs::path(out_dir) / csv_name).string(),
            "family,block_len,gap,min_log_ratio,max_log_ratio,c_n,envelope", csv);
  Json res;
  res["rows"] = rows;
  return res;
}

// ---------------------------------------------------------------- corr-decay

Json run_corr_decay(const Json& cfg, const std::string& out_dir, const std::string& csv_name) {
  const double beta = cfg.at("params").at("beta").get<double>();
  const double h = cfg.at("params").at("h").get<double>();
  const int n = cfg.at("params").at("window").get<int>();
  const int replicas = cfg.at("params").at("replicas").get<int>();
  const auto ms = cfg.at("schedule").get<std::vector<int>>();
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

  JointModel m = rfim_model(1, beta, h);
  std::vector<std::vector<double>> per_replica;
  auto rows = quenched_correlation_decay(m, ms, Window::interval(0, n - 1), Boundary::free_bc(),
                                         replicas, seed, 1, &per_replica);
  // one JSON-lines record per disorder replica, in replica order
  {
    std::ofstream jl((fs::path(out_dir) / "corr-decay.jsonl").string(), std::ios::binary);
    for (std::size_t rep = 0; rep < per_replica.size(); ++rep) {
      Json rec;
      rec["replica"] = rep;
      rec["seed"] = CounterRng::derive(seed, static_cast<std::uint64_t>(rep));
      rec["ms"] = ms;
      rec["abs_cov"] = per_replica[rep];
      jl << rec.dump() << "\n";
    }
  }
  Json jr = Json::array();
  std::vector<std::string> csv;
  for (const auto& r : rows) {
    Json row;
    row["m"] = r.m;
    row["mean"] = r.mean;
    row["se"] = r.se;
    row["replicas"] = r.replicas;
    row["tanh_envelope"] = std::pow(std::tanh(beta), r.m);
    row["tier"] = "Exact-per-replica";
    jr.push_back(row);
    csv.push_back(std::to_string(r.m) + "," + fmt(r.mean) + "," + fmt(r.se) + "," +
                  std::to_string(r.replicas));
  }
  write_csv((fs::path(out_dir) / csv_name).string(), "m,mean,se,replicas", csv);
  Json res;
  res["rows"] = jr;
  return res;
}

// --------------------------------------------------------------- oscillation

Json run_oscillation(const Json& cfg) {
  const double beta = cfg.at("params").at("beta").get<double>();
  Json res;

  // finite-range Gibbs kernel: the gap closes once the annulus covers the range
  {
    auto phi = ising_potential(1, beta, 0.0);
    Window vol = Window::interval(0, 0);
    Window amb = Window::interval(-4, 4);
    auto center = Configuration::constant(amb, SpinAlphabet::ising(), 1);
    auto f = LocalFunction::spin_at(origin(), 2);
    Json rows = Json::array();
    for (int n = 0; n <= 3; ++n) {
      auto rep = oscillation_gibbs(phi, f, vol, center, n);
      Json row;
      row["op"] = "oscillation-gibbs";
      row["annulus"] = n;
      row["value"] = rep.gap();
      row["error"] = rep.mc_error;
      row["evaluations"] = rep.evaluations;
      row["tier"] = "Exact";
      rows.push_back(row);
    }
    res["gibbs_1d"] = rows;
  }

  // decimated 1D chain: exact constrained enumeration; the gap decays
  {
    const int b = 2;
    auto phi = ising_potential(1, beta, 0.0);
    Json rows = Json::array();
    const int radius = 3;  // decimated window [-radius, radius]
    Window dec_win = Window::interval(-radius, radius);
    Window orig = Window::interval(-b * radius, b * radius);
    auto kernel_mean = [&](const Configuration& dec_boundary) {
      // E[s_0 | decimated spins off the origin]
      std::vector<std::uint8_t> mask(static_cast<std::size_t>(orig.site_count()), 0);
      std::vector<std::uint8_t> vals(static_cast<std::size_t>(orig.site_count()), 1);
      for (int y = -radius; y <= radius; ++y) {
        if (y == 0) continue;
        Site s = site1(b * y);
        mask[static_cast<std::size_t>(orig.index_of(s))] = 1;
        vals[static_cast<std::size_t>(orig.index_of(s))] =
            static_cast<std::uint8_t>(dec_boundary.value_at(site1(y)));
      }
      Site c = site1(0);
      mask[static_cast<std::size_t>(orig.index_of(c))] = 1;
      double lw[2];
      for (int s = 0; s < 2; ++s) {
        vals[static_cast<std::size_t>(orig.index_of(c))] = static_cast<std::uint8_t>(s);
        lw[s] = constrained_log_partition(phi, orig, Boundary::free_bc(), mask, vals);
      }
      double pplus = 1.0 / (1.0 + std::exp(lw[0] - lw[1]));
      return 2 * pplus - 1;
    };
    auto center = Configuration::constant(dec_win, SpinAlphabet::ising(), 1);
    Json rows_out = Json::array();
    for (int n = 0; n < radius; ++n) {
      std::vector<Site> vary;
      for (int y = -radius; y <= radius; ++y)
        if (y != 0 && std::abs(y) > n) vary.push_back(site1(y));
      auto rep = oscillate(kernel_mean, center, vary, "decimated-spin");
      Json row;
      row["op"] = "oscillation-decimated-1d";
      row["annulus"] = n;
      row["value"] = rep.gap();
      row["error"] = rep.mc_error;
      row["evaluations"] = rep.evaluations;
      row["tier"] = "Exact-constrained";
      rows_out.push_back(row);
    }
    rows = rows_out;
    res["decimated_1d"] = rows;
  }

  // decimated 2D at the declared extension family, exact constrained sums
  {
    const double b2 = cfg.at("params").at("beta_2d").get<double>();
    auto phi = ising_potential(2, b2, 0.0);
    const int radius = 1;
    Window dec_win = Window::cube(2, radius);
    Window orig = Window::cube(2, 2 * radius);
    auto kernel_mean = [&](const Configuration& dec_boundary) {
      std::vector<std::uint8_t> mask(static_cast<std::size_t>(orig.site_count()), 0);
      std::vector<std::uint8_t> vals(static_cast<std::size_t>(orig.site_count()), 1);
      for (std::int64_t i = 0; i < dec_win.site_count(); ++i) {
        Site y = dec_win.site_at(i);
        if (y == origin()) continue;
        Site s = site2(2 * y[0], 2 * y[1]);
        mask[static_cast<std::size_t>(orig.index_of(s))] = 1;
        vals[static_cast<std::size_t>(orig.index_of(s))] =
            static_cast<std::uint8_t>(dec_boundary.value_at(y));
      }
      mask[static_cast<std::size_t>(orig.index_of(origin()))] = 1;
      double lw[2];
      for (int s = 0; s < 2; ++s) {
        vals[static_cast<std::size_t>(orig.index_of(origin()))] = static_cast<std::uint8_t>(s);
        lw[s] = constrained_log_partition(phi, orig, Boundary::free_bc(), mask, vals);
      }
      return 2.0 / (1.0 + std::exp(lw[0] - lw[1])) - 1.0;
    };
    // alternating centre, extensions from the declared family
    auto alternating = Configuration::constant(dec_win, SpinAlphabet::ising(), 1);
    for (std::int64_t i = 0; i < dec_win.site_count(); ++i) {
      Site y = dec_win.site_at(i);
      alternating.set_value(y, ((y[0] + y[1]) % 2 + 2) % 2);
    }
    double vplus = kernel_mean(Configuration::constant(dec_win, SpinAlphabet::ising(), 1));
    double vminus = kernel_mean(Configuration::constant(dec_win, SpinAlphabet::ising(), 0));
    double valt = kernel_mean(alternating);
    Json row;
    row["op"] = "oscillation-decimated-2d";
    row["beta"] = b2;
    row["family"] = {"all-plus", "all-minus", "alternating"};
    row["values"] = {vplus, vminus, valt};
    row["value"] = std::max({vplus, vminus, valt}) - std::min({vplus, vminus, valt});
    row["error"] = 0.0;
    row["tier"] = "Exact-constrained";
    res["decimated_2d"] = row;
  }
  return res;
}

}  // namespace

const std::vector<std::string>& experiment_names() { return kExperiments; }

Json default_config(const std::string& experiment) {
  Json cfg;
  cfg["schema_version"] = kConfigSchemaVersion;
  cfg["experiment"] = experiment;
  cfg["workers"] = 0;
  cfg["out_dir"] = ".";
  Json p;
  if (experiment == "check-spec") {
    p["beta"] = 0.8;
    p["h"] = 0.5;
    cfg["schedule"] = Json::array({1, 2, 3, 4});
  } else if (experiment == "vp-1d") {
    p["betas"] = {0.0, 0.3, 0.6, 1.0};
    cfg["schedule"] = {4, 6, 8, 10, 12};
  } else if (experiment == "vp-product") {
    p["p"] = 0.3;
    p["q"] = 0.6;
    cfg["schedule"] = {4, 6, 8, 10, 12};
  } else if (experiment == "grising") {
    p["p"] = 0.3;
    p["beta"] = 0.9;
    p["replicas"] = 64;
    cfg["schedule"] = {3, 5, 7};
    cfg["seed"] = 20240901;
  } else if (experiment == "decimate") {
    p["beta"] = 0.7;
    p["b"] = 2;
    p["beta_2d"] = 0.9;
    cfg["schedule"] = {2, 4, 6, 8, 10};
  } else if (experiment == "rfim-joint") {
    p["beta"] = 0.6;
    p["h"] = 0.4;
    p["nmax"] = 10;
    cfg["schedule"] = {2, 4, 6, 8, 10};
    cfg["seed"] = 20240902;
  } else if (experiment == "ad-check") {
    p["beta"] = 0.7;
    p["h"] = 0.3;
    cfg["schedule"] = {1, 2, 4};
    cfg["seed"] = 20240903;
  } else if (experiment == "corr-decay") {
    p["beta"] = 0.6;
    p["h"] = 0.2;
    p["window"] = 10;
    p["replicas"] = 16;
    cfg["schedule"] = {1, 2, 3, 4, 5};
    cfg["seed"] = 20240904;
  } else if (experiment == "oscillation") {
    p["beta"] = 0.8;
    p["beta_2d"] = 1.2;
    cfg["schedule"] = {0, 1, 2, 3};
    cfg["seed"] = 20240905;
  } else {
    throw SchemaError("unknown experiment: " + experiment);
  }
  cfg["params"] = p;
  return cfg;
}

Json resolve_config(Json cfg, const CliOverrides& ov) {
  if (!cfg.contains("experiment") || !cfg["experiment"].is_string())
    throw SchemaError("config: missing experiment id");
  const std::string exp = cfg["experiment"].get<std::string>();
  if (std::find(kExperiments.begin(), kExperiments.end(), exp) == kExperiments.end())
    throw SchemaError("config: unknown experiment " + exp);
  Json base = default_config(exp);
  // overlay the user config on the defaults
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (it.key() == "params") {
      if (!it.value().is_object()) throw SchemaError("config: params must be an object");
      for (auto pit = it.value().begin(); pit != it.value().end(); ++pit)
        base["params"][pit.key()] = pit.value();
    } else {
      base[it.key()] = it.value();
    }
  }
  if (ov.seed) base["seed"] = *ov.seed;
  if (ov.workers) base["workers"] = *ov.workers;
  if (!ov.schedule.empty()) base["schedule"] = ov.schedule;
  if (!ov.out_dir.empty()) base["out_dir"] = ov.out_dir;

  if (!base.contains("schema_version") || base["schema_version"].get<int>() != kConfigSchemaVersion)
    throw SchemaError("config: schema_version mismatch");
  if (!base["schedule"].is_array() || base["schedule"].empty())
    throw SchemaError("config: schedule must be a non-empty array");
  std::vector<long long> sched;
  for (const auto& v : base["schedule"]) {
    if (!v.is_number_integer()) throw SchemaError("config: schedule entries must be integers");
    sched.push_back(v.get<long long>());
  }
  for (std::size_t i = 0; i + 1 < sched.size(); ++i)
    if (sched[i] >= sched[i + 1]) throw SchemaError("config: schedule must be strictly increasing");
  if (needs_seed(exp) && !base.contains("seed"))
    throw SchemaError("config: seed required for experiments with an MC tier");
  if (base.contains("seed") && !base["seed"].is_number())
    throw SchemaError("config: seed must be numeric");
  if (!base["workers"].is_number_integer() || base["workers"].get<int>() < 0)
    throw SchemaError("config: workers must be a non-negative integer");
  return base;
}

int run_experiment(const Json& cfg) {
  const std::string exp = cfg.at("experiment").get<std::string>();
  const std::string out_dir = cfg.at("out_dir").get<std::string>();
  const int workers = cfg.at("workers").get<int>();
  if (workers > 0) par::set_threads(workers);
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  try {
    Json results;
    if (exp == "check-spec")
      results = run_check_spec(cfg);
    else if (exp == "vp-1d")
      results = run_vp_1d(cfg, out_dir, "vp-1d.csv");
    else if (exp == "vp-product")
      results = run_vp_product(cfg);
    else if (exp == "grising")
      results = run_grising(cfg, out_dir, "grising.csv");
    else if (exp == "decimate")
      results = run_decimate(cfg, out_dir, "decimate.csv");
    else if (exp == "rfim-joint")
      results = run_rfim_joint(cfg);
    else if (exp == "ad-check")
      results = run_ad_check(cfg, out_dir, "ad-check.csv");
    else if (exp == "corr-decay")
      results = run_corr_decay(cfg, out_dir, "corr-decay.csv");
    else if (exp == "oscillation")
      results = run_oscillation(cfg);
    else
      throw SchemaError("unknown experiment " + exp);

    Json artifact;
    artifact["version"] = kVersion;
    artifact["config"] = cfg;
    artifact["results"] = results;
    write_json_file(artifact, (fs::path(out_dir) / (exp + ".json")).string());
    return kExitOk;
  } catch (const SchemaError&) {
    throw;
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    if (what.find("too large") != std::string::npos ||
        what.find("too many") != std::string::npos) {
      return kExitResource;
    }
    throw;
  }
}

}  // namespace ggibbs

#include "ggibbs/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ggibbs/specification.hpp"

namespace ggibbs {

Window MeasureFamily::window(int n) const {
  if (n < 1) throw std::invalid_argument("family: n < 1");
  Site lo{}, hi{};
  for (int k = 0; k < dim(); ++k) hi[k] = n - 1;
  return Window(dim(), lo, hi);
}

double MeasureFamily::log_prob_block(const Configuration& block) const {
  const std::int64_t n = block.window().site_count();
  // locate the schedule index with this window
  for (int k = 1; k <= 64; ++k) {
    if (window(k) == block.window()) {
      ExactMeasure m = marginal(k);
      double p = m.prob(encode_state(q(), n, block.values().data()));
      return p > 0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    }
    if (window(k).site_count() > n) break;
  }
  throw std::invalid_argument("log_prob_block: block window not on the family schedule");
}

SpinAlphabet MeasureFamily::alphabet() const {
  if (q() == 2) return SpinAlphabet::ising();
  SpinAlphabet a;
  for (int i = 0; i < q(); ++i) a.symbols.push_back("s" + std::to_string(i));
  a.plus_symbol = q() - 1;
  return a;
}

std::vector<std::uint8_t> MeasureFamily::sample_block(int, CounterRng&) const {
  throw std::logic_error("family is not sampleable");
}

ProductFamily::ProductFamily(std::vector<double> weights, int dim)
    : weights_(std::move(weights)), dim_(dim) {
  double s = 0.0;
  for (double w : weights_) {
    if (w < 0) throw std::invalid_argument("product family: negative weight");
    s += w;
  }
  for (auto& w : weights_) w /= s;
}

ExactMeasure ProductFamily::marginal(int n) const {
  return ExactMeasure::product(window(n), weights_);
}

double ProductFamily::log_prob_block(const Configuration& block) const {
  double lp = 0.0;
  for (std::uint8_t v : block.values()) {
    if (weights_[v] == 0.0) return -std::numeric_limits<double>::infinity();
    lp += std::log(weights_[v]);
  }
  return lp;
}

std::vector<double> ProductFamily::marginal_sites(const std::vector<Site>& sites) const {
  const std::int64_t m = static_cast<std::int64_t>(sites.size());
  const int qq = q();
  std::vector<double> out(static_cast<std::size_t>(state_count(qq, m)));
  std::vector<std::uint8_t> v(static_cast<std::size_t>(m));
  for (std::size_t st = 0; st < out.size(); ++st) {
    decode_state(static_cast<std::int64_t>(st), qq, m, v.data());
    double p = 1.0;
    for (std::int64_t k = 0; k < m; ++k) p *= weights_[v[static_cast<std::size_t>(k)]];
    out[st] = p;
  }
  return out;
}

std::vector<std::uint8_t> ProductFamily::sample_block(int n, CounterRng& rng) const {
  const std::int64_t ns = window(n).site_count();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(ns));
  for (auto& v : out) {
    double u = rng.uniform01(), acc = 0.0;
    v = static_cast<std::uint8_t>(q() - 1);
    for (int s = 0; s < q(); ++s) {
      acc += weights_[static_cast<std::size_t>(s)];
      if (u < acc) {
        v = static_cast<std::uint8_t>(s);
        break;
      }
    }
  }
  return out;
}

ChainFamily::ChainFamily(TransferChain chain, std::string tag)
    : chain_(std::move(chain)), tag_(std::move(tag)) {}

double ChainFamily::log_prob_block(const Configuration& block) const {
  const int n = static_cast<int>(block.window().site_count());
  return chain_.log_prob(n, block.values().data());
}

std::vector<double> ChainFamily::marginal_sites(const std::vector<Site>& sites) const {
  // bulk chains are translation invariant; require a contiguous ascending run
  for (std::size_t i = 0; i + 1 < sites.size(); ++i)
    if (sites[i + 1][0] != sites[i][0] + 1)
      throw std::invalid_argument("chain marginal_sites: contiguous 1D sites required");
  if (chain_.left_edge() != TransferChain::Edge::Bulk)
    throw std::invalid_argument("chain marginal_sites: bulk chains only");
  return chain_.marginal(static_cast<int>(sites.size())).probs();
}

GibbsFamily::GibbsFamily(Potential phi, Bc bc, SpinAlphabet alphabet)
    : phi_(std::move(phi)), bc_(bc), alphabet_(std::move(alphabet)) {}

ExactMeasure GibbsFamily::measure_on(const Window& w) const {
  if (bc_ == Bc::Free) return finite_gibbs(phi_, w, Boundary::free_bc());
  int sym = bc_ == Bc::Plus ? alphabet_.plus_symbol : 0;
  return finite_gibbs(phi_, w, Boundary::constant(w, alphabet_, sym));
}

ExactMeasure GibbsFamily::marginal(int n) const { return measure_on(window(n)); }

std::vector<double> GibbsFamily::marginal_sites(const std::vector<Site>& sites) const {
  // realize the measure on the bounding box of the requested sites
  Site lo = sites[0], hi = sites[0];
  for (const Site& s : sites)
    for (int k = 0; k < phi_.dim(); ++k) {
      lo[k] = std::min(lo[k], s[k]);
      hi[k] = std::max(hi[k], s[k]);
    }
  return measure_on(Window(phi_.dim(), lo, hi)).marginal_sites(sites);
}

DeltaFamily::DeltaFamily(int q, int symbol, int dim) : q_(q), symbol_(symbol), dim_(dim) {}

ExactMeasure DeltaFamily::marginal(int n) const {
  Window w = window(n);
  std::vector<double> probs(static_cast<std::size_t>(state_count(q_, w.site_count())), 0.0);
  std::vector<std::uint8_t> v(static_cast<std::size_t>(w.site_count()),
                              static_cast<std::uint8_t>(symbol_));
  probs[static_cast<std::size_t>(encode_state(q_, w.site_count(), v.data()))] = 1.0;
  return ExactMeasure(w, q_, std::move(probs));
}

double DeltaFamily::log_prob_block(const Configuration& block) const {
  return block.all_equal(symbol_) ? 0.0 : -std::numeric_limits<double>::infinity();
}

std::vector<double> DeltaFamily::marginal_sites(const std::vector<Site>& sites) const {
  std::vector<double> out(static_cast<std::size_t>(state_count(q_, static_cast<std::int64_t>(sites.size()))), 0.0);
  std::vector<std::uint8_t> v(sites.size(), static_cast<std::uint8_t>(symbol_));
  out[static_cast<std::size_t>(encode_state(q_, static_cast<std::int64_t>(sites.size()), v.data()))] = 1.0;
  return out;
}

std::vector<std::uint8_t> DeltaFamily::sample_block(int n, CounterRng&) const {
  return std::vector<std::uint8_t>(static_cast<std::size_t>(window(n).site_count()),
                                   static_cast<std::uint8_t>(symbol_));
}

Ent relative_entropy_fv(const ExactMeasure& mu, const ExactMeasure& nu) {
  if (!(mu.window() == nu.window()) || mu.q() != nu.q())
    throw std::invalid_argument("relative_entropy_fv: window mismatch");
  double h = 0.0;
  for (std::int64_t s = 0; s < mu.n_states(); ++s) {
    double p = mu.prob(s);
    if (p == 0.0) continue;  // 0 log 0 = 0
    double r = nu.prob(s);
    if (r == 0.0) return Ent::inf();
    h += p * std::log(p / r);
  }
  return Ent::of(h);
}

EntropyEstimate extrapolate(const std::string& method,
                            std::vector<std::pair<int, double>> points) {
  EntropyEstimate est;
  est.method = method;
  est.points = points;
  if (points.empty()) throw std::invalid_argument("extrapolate: no points");
  // least squares a + c/L on the largest 5 points
  std::size_t k0 = points.size() > 5 ? points.size() - 5 : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = k0; i < points.size(); ++i) {
    double x = 1.0 / points[i].first;
    double y = points[i].second;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  double a;
  if (m == 1) {
    a = sy;
  } else {
    double det = m * sxx - sx * sx;
    a = (sy * sxx - sx * sxy) / det;
  }
  est.density = a;
  std::size_t k1 = points.size() > 3 ? points.size() - 3 : 0;
  double lo = a, hi = a;
  for (std::size_t i = k1; i < points.size(); ++i) {
    lo = std::min(lo, points[i].second);
    hi = std::max(hi, points[i].second);
  }
  est.bracket_lo = lo;
  est.bracket_hi = hi;
  return est;
}

namespace {

std::string joint_tag(const MeasureFamily& a, const MeasureFamily& b) {
  return a.method_tag() == "Transfer" && b.method_tag() == "Transfer" ? "Transfer" : "Exact";
}

}  // namespace

EntropyEstimate relative_entropy_density(const MeasureFamily& mu, const MeasureFamily& nu,
                                         const std::vector<int>& schedule) {
  std::vector<std::pair<int, double>> pts;
  for (int n : schedule) {
    Ent h = relative_entropy_fv(mu.marginal(n), nu.marginal(n));
    if (h.infinite) {
      EntropyEstimate est;
      est.method = joint_tag(mu, nu);
      est.points = pts;
      est.infinite = true;
      return est;
    }
    pts.emplace_back(mu.window(n).extent(0),
                     h.value / static_cast<double>(mu.window(n).site_count()));
  }
  return extrapolate(joint_tag(mu, nu), std::move(pts));
}

EntropyEstimate ks_entropy(const MeasureFamily& mu, const std::vector<int>& schedule) {
  std::vector<std::pair<int, double>> pts;
  for (int n : schedule) {
    ExactMeasure m = mu.marginal(n);
    double h = 0.0;
    for (std::int64_t s = 0; s < m.n_states(); ++s) {
      double p = m.prob(s);
      if (p > 0) h -= p * std::log(p);
    }
    pts.emplace_back(mu.window(n).extent(0), h / static_cast<double>(mu.window(n).site_count()));
  }
  return extrapolate(mu.method_tag(), std::move(pts));
}

EntropyEstimate e_lambda(const MeasureFamily& nu, const MeasureFamily& lambda,
                         const std::vector<int>& schedule, int mc_samples, std::uint64_t seed) {
  std::vector<std::pair<int, double>> pts;
  const SpinAlphabet alpha = nu.alphabet();
  bool mc = mc_samples > 0;
  double worst_se = 0.0;
  for (int n : schedule) {
    Window w = lambda.window(n);
    double acc = 0.0;
    if (!mc) {
      ExactMeasure lm = lambda.marginal(n);
      std::vector<std::uint8_t> v(static_cast<std::size_t>(w.site_count()));
      for (std::int64_t s = 0; s < lm.n_states(); ++s) {
        double p = lm.prob(s);
        if (p == 0.0) continue;
        decode_state(s, lambda.q(), w.site_count(), v.data());
        Configuration block(w, alpha, v, Exterior::constant_rule(alpha.plus_symbol));
        double lp = nu.log_prob_block(block);
        if (!std::isfinite(lp)) {
          EntropyEstimate est;
          est.method = nu.method_tag();
          est.points = pts;
          est.infinite = true;  // lambda charges a nu-null cylinder
          return est;
        }
        acc += p * lp;
      }
    } else {
      if (!lambda.sampleable()) throw std::invalid_argument("e_lambda: lambda not sampleable");
      CounterRng rng(CounterRng::derive(seed, static_cast<std::uint64_t>(n)));
      double s1 = 0.0, s2 = 0.0;
      for (int k = 0; k < mc_samples; ++k) {
        auto v = lambda.sample_block(n, rng);
        Configuration block(w, alpha, v, Exterior::constant_rule(alpha.plus_symbol));
        double lp = nu.log_prob_block(block);
        if (!std::isfinite(lp)) {
          EntropyEstimate est;
          est.method = "MC";
          est.points = pts;
          est.infinite = true;
          return est;
        }
        s1 += lp;
        s2 += lp * lp;
      }
      acc = s1 / mc_samples;
      double var = std::max(0.0, s2 / mc_samples - acc * acc);
      worst_se = std::max(worst_se, std::sqrt(var / mc_samples) /
                                        static_cast<double>(w.site_count()));
    }
    pts.emplace_back(w.extent(0), -acc / static_cast<double>(w.site_count()));
  }
  EntropyEstimate est = extrapolate(mc ? "MC" : nu.method_tag(), std::move(pts));
  est.mc_error = worst_se;
  return est;
}

EntropyEstimate e_plus(const MeasureFamily& nu, const std::vector<int>& schedule) {
  DeltaFamily delta(nu.q(), nu.alphabet().plus_symbol, nu.dim());
  return e_lambda(nu, delta, schedule);
}

double sullivan_d_average(const Potential& phi, const MeasureFamily& mu) {
  const int r = phi.range();
  const int d = phi.dim();
  // sites of the r-ball around the origin on the lower lex side; D(sigma^+)
  // depends on sigma through exactly these
  std::vector<Site> dep;
  for (const Site& s : Window::cube(d, r).sites())
    if (lex_le(s, origin(), d)) dep.push_back(s);
  std::vector<double> marg = mu.marginal_sites(dep);
  const SpinAlphabet alpha = mu.alphabet();
  const int plus = alpha.plus_symbol;
  Window ball = Window::cube(d, r);
  double acc = 0.0;
  std::vector<std::uint8_t> v(dep.size());
  for (std::size_t st = 0; st < marg.size(); ++st) {
    if (marg[st] == 0.0) continue;
    decode_state(static_cast<std::int64_t>(st), mu.q(), static_cast<std::int64_t>(dep.size()),
                 v.data());
    Configuration cfg = Configuration::constant(ball, alpha, plus);
    for (std::size_t k = 0; k < dep.size(); ++k) cfg.set_value(dep[k], v[k]);
    acc += marg[st] * d_function(phi, cfg);
  }
  return acc;
}

std::pair<double, double> sullivan_d_average_mc(const Potential& phi, const SampleSet& samples,
                                                const SpinAlphabet& alphabet) {
  double s1 = 0.0, s2 = 0.0;
  const Window& w = samples.window;
  for (const auto& sv : samples.samples) {
    Configuration cfg(w, alphabet, sv, Exterior::constant_rule(alphabet.plus_symbol));
    double dv = d_function(phi, plus_splice(cfg));
    s1 += dv;
    s2 += dv * dv;
  }
  double n = static_cast<double>(samples.samples.size());
  double mean = s1 / n;
  double var = std::max(0.0, s2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

SullivanResult sullivan_density(const Potential& phi, const MeasureFamily& mu,
                                const EntropyEstimate& eplus, const std::vector<int>& schedule) {
  SullivanResult res;
  if (eplus.infinite) {
    res.infinite = true;
    return res;
  }
  EntropyEstimate ks = ks_entropy(mu, schedule);
  res.e_plus_term = eplus.density;
  res.ks_term = ks.density;
  res.d_term = sullivan_d_average(phi, mu);
  res.value = res.e_plus_term - res.ks_term - res.d_term;
  return res;
}

EntropyEstimate pressure_ratio_check(const MeasureFamily& mu, const MeasureFamily& nu,
                                     const std::vector<int>& schedule) {
  std::vector<std::pair<int, double>> pts;
  const SpinAlphabet alpha = mu.alphabet();
  for (int n : schedule) {
    Window w = mu.window(n);
    Configuration plus = Configuration::constant(w, alpha, alpha.plus_symbol);
    double lm = mu.log_prob_block(plus);
    double ln = nu.log_prob_block(plus);
    if (!std::isfinite(lm) || !std::isfinite(ln)) {
      EntropyEstimate est;
      est.method = joint_tag(mu, nu);
      est.points = pts;
      est.infinite = true;
      return est;
    }
    pts.emplace_back(w.extent(0), (lm - ln) / static_cast<double>(w.site_count()));
  }
  return extrapolate(joint_tag(mu, nu), std::move(pts));
}

}  // namespace ggibbs

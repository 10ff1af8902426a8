#include "ggibbs/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ggibbs/parallel.hpp"
#include "ggibbs/rng.hpp"
#include "ggibbs/specification.hpp"

namespace ggibbs {

ExactMeasure::ExactMeasure(Window win, int q, std::vector<double> probs)
    : win_(win), q_(q), probs_(std::move(probs)) {
  if (static_cast<std::int64_t>(probs_.size()) != state_count(q_, win_.site_count()))
    throw std::invalid_argument("measure: table size != q^|window|");
}

double ExactMeasure::prob_of(const Configuration& block) const {
  if (!(block.window() == win_)) throw std::invalid_argument("prob_of: window mismatch");
  return probs_[static_cast<std::size_t>(
      encode_state(q_, win_.site_count(), block.values().data()))];
}

double ExactMeasure::log_prob(std::int64_t state) const {
  double p = prob(state);
  return p > 0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

double ExactMeasure::total() const {
  double s = 0.0;
  for (double p : probs_) s += p;
  return s;
}

void ExactMeasure::validate(double tol) const {
  for (double p : probs_)
    if (p < 0) throw std::runtime_error("measure: negative probability");
  if (std::abs(total() - 1.0) > tol) throw std::runtime_error("measure: not normalized");
}

ExactMeasure ExactMeasure::marginal(const Window& sub) const {
  if (!win_.contains_window(sub)) throw std::invalid_argument("marginal: sub not inside window");
  const std::int64_t n = win_.site_count();
  const std::int64_t m = sub.site_count();
  std::vector<std::int64_t> substride(static_cast<std::size_t>(m));
  // strides of sub sites in the output index
  std::vector<std::int64_t> src_index(static_cast<std::size_t>(m));
  std::int64_t s = 1;
  for (std::int64_t k = 0; k < m; ++k) {
    substride[static_cast<std::size_t>(k)] = s;
    s *= q_;
    src_index[static_cast<std::size_t>(k)] = win_.index_of(sub.site_at(k));
  }
  std::vector<double> out(static_cast<std::size_t>(state_count(q_, m)), 0.0);
  std::vector<std::uint8_t> vals(static_cast<std::size_t>(n));
  for (std::int64_t st = 0; st < n_states(); ++st) {
    decode_state(st, q_, n, vals.data());
    std::int64_t oi = 0;
    for (std::int64_t k = 0; k < m; ++k)
      oi += substride[static_cast<std::size_t>(k)] * vals[static_cast<std::size_t>(src_index[static_cast<std::size_t>(k)])];
    out[static_cast<std::size_t>(oi)] += probs_[static_cast<std::size_t>(st)];
  }
  return ExactMeasure(sub, q_, std::move(out));
}

std::vector<double> ExactMeasure::marginal_sites(const std::vector<Site>& sites) const {
  const std::int64_t n = win_.site_count();
  const std::int64_t m = static_cast<std::int64_t>(sites.size());
  std::vector<double> out(static_cast<std::size_t>(state_count(q_, m)), 0.0);
  std::vector<std::int64_t> src(static_cast<std::size_t>(m));
  for (std::int64_t k = 0; k < m; ++k) {
    if (!win_.contains(sites[static_cast<std::size_t>(k)]))
      throw std::invalid_argument("marginal_sites: site outside window");
    src[static_cast<std::size_t>(k)] = win_.index_of(sites[static_cast<std::size_t>(k)]);
  }
  std::vector<std::uint8_t> vals(static_cast<std::size_t>(n));
  for (std::int64_t st = 0; st < n_states(); ++st) {
    decode_state(st, q_, n, vals.data());
    std::int64_t oi = 0, stride = 1;
    for (std::int64_t k = 0; k < m; ++k) {
      oi += stride * vals[static_cast<std::size_t>(src[static_cast<std::size_t>(k)])];
      stride *= q_;
    }
    out[static_cast<std::size_t>(oi)] += probs_[static_cast<std::size_t>(st)];
  }
  return out;
}

double ExactMeasure::expectation(const std::function<double(const std::uint8_t*)>& f) const {
  const std::int64_t n = win_.site_count();
  std::vector<std::uint8_t> vals(static_cast<std::size_t>(n));
  double s = 0.0;
  for (std::int64_t st = 0; st < n_states(); ++st) {
    decode_state(st, q_, n, vals.data());
    s += probs_[static_cast<std::size_t>(st)] * f(vals.data());
  }
  return s;
}

ExactMeasure ExactMeasure::uniform(const Window& win, int q) {
  std::int64_t n = state_count(q, win.site_count());
  return ExactMeasure(win, q, std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
}

ExactMeasure ExactMeasure::product(const Window& win, const std::vector<double>& weights) {
  const int q = static_cast<int>(weights.size());
  const std::int64_t n = win.site_count();
  const std::int64_t ns = state_count(q, n);
  std::vector<double> probs(static_cast<std::size_t>(ns));
  std::vector<std::uint8_t> vals(static_cast<std::size_t>(n));
  for (std::int64_t st = 0; st < ns; ++st) {
    decode_state(st, q, n, vals.data());
    double p = 1.0;
    for (std::int64_t k = 0; k < n; ++k) p *= weights[vals[static_cast<std::size_t>(k)]];
    probs[static_cast<std::size_t>(st)] = p;
  }
  return ExactMeasure(win, q, std::move(probs));
}

ExactMeasure finite_gibbs(const Potential& phi, const Window& volume, const Boundary& bc) {
  if (bc.kind == Boundary::Kind::Fixed) {
    // same table as the kernel, bit for bit
    KernelTable k = gibbs_kernel(phi, volume, *bc.omega);
    return ExactMeasure(volume, phi.q(), k.probs);
  }
  const std::int64_t n = volume.site_count();
  const std::int64_t ns = state_count(phi.q(), n);
  CompiledEnergy ce(phi, volume, bc);
  const int q = phi.q();
  std::vector<double> loge(static_cast<std::size_t>(ns));
  par::for_each_state(ns, [&](std::int64_t st) {
    std::uint8_t vals[64];
    decode_state(st, q, n, vals);
    loge[static_cast<std::size_t>(st)] = -ce.energy(vals);
  });
  double lz = par::logsumexp(ns, [&](std::int64_t st) { return loge[static_cast<std::size_t>(st)]; });
  std::vector<double> probs(static_cast<std::size_t>(ns));
  for (std::int64_t st = 0; st < ns; ++st)
    probs[static_cast<std::size_t>(st)] = std::exp(loge[static_cast<std::size_t>(st)] - lz);
  return ExactMeasure(volume, q, std::move(probs));
}

namespace {

SpinAlphabet generic_alphabet(int q) {
  if (q == 2) return SpinAlphabet::ising();
  SpinAlphabet a;
  for (int i = 0; i < q; ++i) a.symbols.push_back("s" + std::to_string(i));
  a.plus_symbol = q - 1;
  return a;
}

// free-boundary dynamics: keep only the interaction terms fully inside the
// window, as anchored terms
Potential restrict_to_window(const Potential& phi, const Window& volume) {
  Potential out(phi.q(), phi.dim());
  for (const auto& inst : phi.instances_meeting(volume)) {
    if (!inst.inside) continue;
    out.add_anchored_term(origin(), inst.abs_sites, inst.term->table);
  }
  return out;
}

}  // namespace

SampleSet gibbs_sampler(const Potential& phi, const Window& volume, const Boundary& bc,
                        std::uint64_t seed, int sweeps, int burn_in, int replicas) {
  SampleSet out;
  out.window = volume;
  out.q = phi.q();
  out.sampler_id = std::string("heat-bath/") + CounterRng::name();
  out.seed = seed;
  out.sweeps = sweeps;
  out.burn_in = burn_in;
  const std::int64_t n = volume.site_count();
  const int q = phi.q();

  const bool fixed = bc.kind == Boundary::Kind::Fixed;
  if (!fixed && bc.kind != Boundary::Kind::Free)
    throw std::invalid_argument("gibbs_sampler: fixed or free boundary only");
  const Potential phi_free = fixed ? Potential(q, phi.dim()) : restrict_to_window(phi, volume);
  const Potential& phi_eff = fixed ? phi : phi_free;
  const Window amb = fixed ? volume.expanded(phi.range()) : volume;
  const SpinAlphabet alpha = fixed ? bc.omega->alphabet() : generic_alphabet(q);

  std::vector<std::vector<std::vector<std::uint8_t>>> per_replica(
      static_cast<std::size_t>(replicas));

  par::for_each_index(replicas, [&](std::int64_t rep) {
    CounterRng rng(CounterRng::derive(seed, static_cast<std::uint64_t>(rep)));
    Configuration state = Configuration::constant(amb, alpha, alpha.plus_symbol);
    if (fixed)
      for (const Site& s : amb.sites_outside(volume)) state.set_value(s, bc.omega->value_at(s));
    for (std::int64_t i = 0; i < n; ++i)
      state.set_value(volume.site_at(i), rng.uniform_int(q));

    auto& bucket = per_replica[static_cast<std::size_t>(rep)];
    for (int sweep = 0; sweep < burn_in + sweeps; ++sweep) {
      for (std::int64_t i = 0; i < n; ++i) {  // raster order, frozen
        Site x = volume.site_at(i);
        Window xw(volume.dim(), x, x);
        KernelTable cond = gibbs_kernel(phi_eff, xw, state);
        double u = rng.uniform01(), acc = 0.0;
        int pick = q - 1;
        for (int v = 0; v < q; ++v) {
          acc += cond.prob(v);
          if (u < acc) {
            pick = v;
            break;
          }
        }
        state.set_value(x, pick);
      }
      if (sweep >= burn_in) {
        std::vector<std::uint8_t> snap(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i)
          snap[static_cast<std::size_t>(i)] =
              static_cast<std::uint8_t>(state.value_at(volume.site_at(i)));
        bucket.push_back(std::move(snap));
      }
    }
  });

  for (auto& bucket : per_replica)
    for (auto& s : bucket) out.samples.push_back(std::move(s));
  return out;
}

namespace {

Window decimated_window(const Window& w, int b) {
  Site lo{}, hi{};
  for (int k = 0; k < w.dim(); ++k) {
    if ((w.hi()[k] - w.lo()[k]) % b != 0)
      throw std::invalid_argument("decimate: b does not divide window extents");
    lo[k] = 0;
    hi[k] = (w.hi()[k] - w.lo()[k]) / b;
  }
  return Window(w.dim(), lo, hi);
}

}  // namespace

ExactMeasure decimate(const ExactMeasure& mu, int b) {
  if (b < 1) throw std::invalid_argument("decimate: b < 1");
  if (b == 1) return mu;
  Window sub = decimated_window(mu.window(), b);
  std::vector<Site> sites;
  for (std::int64_t i = 0; i < sub.site_count(); ++i) {
    Site y = sub.site_at(i);
    Site s = mu.window().lo();
    for (int k = 0; k < sub.dim(); ++k) s[k] += b * y[k];
    sites.push_back(s);
  }
  return ExactMeasure(sub, mu.q(), mu.marginal_sites(sites));
}

SampleSet decimate(const SampleSet& mu, int b) {
  if (b < 1) throw std::invalid_argument("decimate: b < 1");
  if (b == 1) return mu;
  Window sub = decimated_window(mu.window, b);
  SampleSet out = mu;
  out.window = sub;
  out.samples.clear();
  for (const auto& s : mu.samples) {
    std::vector<std::uint8_t> r(static_cast<std::size_t>(sub.site_count()));
    for (std::int64_t i = 0; i < sub.site_count(); ++i) {
      Site y = sub.site_at(i);
      Site src = mu.window.lo();
      for (int k = 0; k < sub.dim(); ++k) src[k] += b * y[k];
      r[static_cast<std::size_t>(i)] = s[static_cast<std::size_t>(mu.window.index_of(src))];
    }
    out.samples.push_back(std::move(r));
  }
  return out;
}

DominationResult stochastic_domination_check(const ExactMeasure& mu, const ExactMeasure& nu) {
  if (!(mu.window() == nu.window()) || mu.q() != nu.q())
    throw std::invalid_argument("domination: common window required");
  const std::int64_t n = mu.window().site_count();
  const int q = mu.q();
  const std::int64_t ns = mu.n_states();
  DominationResult res;

  // covering moves: raise one site by one symbol
  auto covers = [&](std::int64_t st) {
    std::vector<std::int64_t> up;
    std::vector<std::uint8_t> v(static_cast<std::size_t>(n));
    decode_state(st, q, n, v.data());
    std::int64_t stride = 1;
    for (std::int64_t k = 0; k < n; ++k) {
      if (v[static_cast<std::size_t>(k)] + 1 < q) up.push_back(st + stride);
      stride *= q;
    }
    return up;
  };

  if (q == 2 && n <= 4) {
    // every monotone 0/1 function
    res.exhaustive = true;
    const std::int64_t nf = std::int64_t{1} << ns;
    for (std::int64_t f = 0; f < nf; ++f) {
      bool monotone = true;
      for (std::int64_t st = 0; st < ns && monotone; ++st) {
        if (!((f >> st) & 1)) continue;
        // f(st) = 1 must force f = 1 on everything above
        for (std::int64_t up : covers(st))
          if (!((f >> up) & 1)) {
            monotone = false;
            break;
          }
      }
      if (!monotone) continue;
      double dmu = 0.0, dnu = 0.0;
      for (std::int64_t st = 0; st < ns; ++st)
        if ((f >> st) & 1) {
          dmu += mu.prob(st);
          dnu += nu.prob(st);
        }
      res.worst_violation = std::max(res.worst_violation, dmu - dnu);
      ++res.functions_tested;
    }
    return res;
  }

  // documented family: up-sets generated by single configurations,
  // f_eta = 1{sigma >= eta}, plus per-site level indicators
  std::vector<std::uint8_t> eta(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n));
  for (std::int64_t ge = 0; ge < ns; ++ge) {
    decode_state(ge, q, n, eta.data());
    double dmu = 0.0, dnu = 0.0;
    for (std::int64_t st = 0; st < ns; ++st) {
      decode_state(st, q, n, v.data());
      bool above = true;
      for (std::int64_t k = 0; k < n && above; ++k)
        above = v[static_cast<std::size_t>(k)] >= eta[static_cast<std::size_t>(k)];
      if (above) {
        dmu += mu.prob(st);
        dnu += nu.prob(st);
      }
    }
    res.worst_violation = std::max(res.worst_violation, dmu - dnu);
    ++res.functions_tested;
  }
  return res;
}

double constrained_log_partition(const Potential& phi, const Window& volume, const Boundary& bc,
                                 const std::vector<std::uint8_t>& fixed_mask,
                                 const std::vector<std::uint8_t>& fixed_vals) {
  const std::int64_t n = volume.site_count();
  if (static_cast<std::int64_t>(fixed_mask.size()) != n ||
      static_cast<std::int64_t>(fixed_vals.size()) != n)
    throw std::invalid_argument("constrained_log_partition: mask size mismatch");
  std::vector<std::int64_t> free_sites;
  for (std::int64_t i = 0; i < n; ++i)
    if (!fixed_mask[static_cast<std::size_t>(i)]) free_sites.push_back(i);
  const std::int64_t nfree = static_cast<std::int64_t>(free_sites.size());
  const std::int64_t ns = state_count(phi.q(), nfree);
  CompiledEnergy ce(phi, volume, bc);
  const int q = phi.q();
  return par::logsumexp(ns, [&](std::int64_t st) {
    std::uint8_t vals[64];
    for (std::int64_t i = 0; i < n; ++i) vals[i] = fixed_vals[static_cast<std::size_t>(i)];
    std::uint8_t freev[64];
    decode_state(st, q, nfree, freev);
    for (std::int64_t k = 0; k < nfree; ++k) vals[free_sites[static_cast<std::size_t>(k)]] = freev[k];
    return -ce.energy(vals);
  });
}

}  // namespace ggibbs

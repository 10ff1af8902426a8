#include "ggibbs/specification.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ggibbs/parallel.hpp"

namespace ggibbs {

double KernelTable::prob_of(const Configuration& sigma) const {
  return probs[static_cast<std::size_t>(state_of(sigma))];
}

std::int64_t KernelTable::state_of(const Configuration& sigma) const {
  const std::int64_t n = volume.site_count();
  std::int64_t st = 0, stride = 1;
  const int q = boundary.alphabet().size();
  for (std::int64_t i = 0; i < n; ++i) {
    st += stride * sigma.value_at(volume.site_at(i));
    stride *= q;
  }
  return st;
}

void KernelTable::validate(double tol) const {
  double s = 0.0;
  for (double p : probs) {
    if (!(p > 0)) throw std::runtime_error("kernel: non-positive entry (null specification)");
    s += p;
  }
  if (std::abs(s - 1.0) > tol) throw std::runtime_error("kernel: not normalized");
}

KernelTable gibbs_kernel(const Potential& phi, const Window& volume,
                         const Configuration& omega) {
  const std::int64_t n = volume.site_count();
  const std::int64_t ns = state_count(phi.q(), n);
  CompiledEnergy ce(phi, volume, Boundary::fixed(omega));
  const int q = phi.q();
  std::vector<double> loge(static_cast<std::size_t>(ns));
  par::for_each_state(ns, [&](std::int64_t st) {
    std::uint8_t vals[64];
    decode_state(st, q, n, vals);
    loge[static_cast<std::size_t>(st)] = -ce.energy(vals);
  });
  const double lz =
      par::logsumexp(ns, [&](std::int64_t st) { return loge[static_cast<std::size_t>(st)]; });
  KernelTable k;
  k.volume = volume;
  k.boundary = omega;
  k.log_probs.resize(static_cast<std::size_t>(ns));
  k.probs.resize(static_cast<std::size_t>(ns));
  for (std::int64_t st = 0; st < ns; ++st) {
    k.log_probs[static_cast<std::size_t>(st)] = loge[static_cast<std::size_t>(st)] - lz;
    k.probs[static_cast<std::size_t>(st)] = std::exp(k.log_probs[static_cast<std::size_t>(st)]);
  }
  return k;
}

double LocalFunction::eval(const Configuration& c) const {
  std::int64_t idx = 0, stride = 1;
  for (const Site& s : support) {
    idx += stride * c.value_at(s);
    stride *= q;
  }
  return table[static_cast<std::size_t>(idx)];
}

LocalFunction LocalFunction::spin_at(const Site& x, int q) {
  LocalFunction f;
  f.support = {x};
  f.q = q;
  f.id = "spin";
  for (int v = 0; v < q; ++v) f.table.push_back(q == 2 ? ising_value(v) : static_cast<double>(v));
  return f;
}

LocalFunction LocalFunction::indicator(const std::vector<Site>& sites,
                                       const std::vector<std::uint8_t>& values, int q) {
  LocalFunction f;
  f.support = sites;
  f.q = q;
  f.id = "indicator";
  std::int64_t ns = 1;
  for (std::size_t i = 0; i < sites.size(); ++i) ns *= q;
  f.table.assign(static_cast<std::size_t>(ns), 0.0);
  std::int64_t idx = 0, stride = 1;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    idx += stride * values[i];
    stride *= q;
  }
  f.table[static_cast<std::size_t>(idx)] = 1.0;
  return f;
}

bool CylinderEvent::matches(const Configuration& c) const {
  for (std::size_t i = 0; i < sites.size(); ++i)
    if (c.value_at(sites[i]) != values[i]) return false;
  return true;
}

FullKernel gibbs_full_kernel(const Potential& phi) {
  return [phi](const Window& volume, const Configuration& omega) {
    KernelTable k = gibbs_kernel(phi, volume, omega);
    const Window& amb = omega.window();
    const int q = phi.q();
    const std::int64_t ns = state_count(q, amb.site_count());
    std::vector<double> probs(static_cast<std::size_t>(ns), 0.0);
    // mass sits on states agreeing with omega outside the volume
    const std::int64_t vol_states = state_count(q, volume.site_count());
    std::vector<std::uint8_t> full(static_cast<std::size_t>(amb.site_count()));
    for (std::int64_t i = 0; i < amb.site_count(); ++i)
      full[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(omega.value_index(i));
    for (std::int64_t vs = 0; vs < vol_states; ++vs) {
      std::uint8_t v[64];
      decode_state(vs, q, volume.site_count(), v);
      for (std::int64_t i = 0; i < volume.site_count(); ++i)
        full[static_cast<std::size_t>(amb.index_of(volume.site_at(i)))] = v[i];
      probs[static_cast<std::size_t>(encode_state(q, amb.site_count(), full.data()))] +=
          k.prob(vs);
    }
    return ExactMeasure(amb, q, std::move(probs));
  };
}

double check_proper(const FullKernel& kernel, const Window& volume,
                    const std::vector<Configuration>& boundaries,
                    const std::vector<CylinderEvent>& events) {
  for (const auto& ev : events)
    for (const Site& s : ev.sites)
      if (volume.contains(s))
        throw std::invalid_argument("check_proper: event not measurable outside the volume");
  double worst = 0.0;
  for (const auto& omega : boundaries) {
    ExactMeasure m = kernel(volume, omega);
    const Window& amb = m.window();
    for (const auto& ev : events) {
      double hit = 0.0, total = 0.0;
      std::vector<std::uint8_t> vals(static_cast<std::size_t>(amb.site_count()));
      for (std::int64_t st = 0; st < m.n_states(); ++st) {
        if (m.prob(st) == 0.0) continue;
        total += m.prob(st);
        decode_state(st, m.q(), amb.site_count(), vals.data());
        bool match = true;
        for (std::size_t i = 0; i < ev.sites.size() && match; ++i)
          match = vals[static_cast<std::size_t>(amb.index_of(ev.sites[i]))] == ev.values[i];
        if (match) hit += m.prob(st);
      }
      double p = hit / total;  // the kernel is a probability measure
      double ind = ev.matches(omega) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(p - ind));
    }
  }
  return worst;
}

double check_consistent(const Potential& phi, const Window& inner, const Window& outer,
                        const Configuration& omega) {
  if (!outer.contains_window(inner))
    throw std::invalid_argument("check_consistent: inner not inside outer");
  const int q = phi.q();
  KernelTable kouter = gibbs_kernel(phi, outer, omega);

  std::vector<Site> rest = outer.sites_outside(inner);
  const std::int64_t nrest = static_cast<std::int64_t>(rest.size());
  const std::int64_t rest_states = state_count(q, nrest);
  const std::int64_t in_states = state_count(q, inner.site_count());

  // gamma_inner tables for every assignment of outer \ inner
  std::vector<KernelTable> kin;
  kin.reserve(static_cast<std::size_t>(rest_states));
  for (std::int64_t rs = 0; rs < rest_states; ++rs) {
    Configuration bnd = omega;
    std::uint8_t rv[64];
    decode_state(rs, q, nrest, rv);
    for (std::int64_t i = 0; i < nrest; ++i) bnd.set_value(rest[static_cast<std::size_t>(i)], rv[i]);
    kin.push_back(gibbs_kernel(phi, inner, bnd));
  }

  // marginal of gamma_outer on outer \ inner per rest-state
  std::vector<double> rest_marg(static_cast<std::size_t>(rest_states), 0.0);
  const std::int64_t outer_states = state_count(q, outer.site_count());
  std::vector<std::uint8_t> ov(static_cast<std::size_t>(outer.site_count()));
  for (std::int64_t os = 0; os < outer_states; ++os) {
    decode_state(os, q, outer.site_count(), ov.data());
    std::int64_t rs = 0, stride = 1;
    for (std::int64_t i = 0; i < nrest; ++i) {
      rs += stride * ov[static_cast<std::size_t>(outer.index_of(rest[static_cast<std::size_t>(i)]))];
      stride *= q;
    }
    rest_marg[static_cast<std::size_t>(rs)] += kouter.prob(os);
  }

  double worst = 0.0;
  for (std::int64_t os = 0; os < outer_states; ++os) {
    decode_state(os, q, outer.site_count(), ov.data());
    std::int64_t rs = 0, stride = 1;
    for (std::int64_t i = 0; i < nrest; ++i) {
      rs += stride * ov[static_cast<std::size_t>(outer.index_of(rest[static_cast<std::size_t>(i)]))];
      stride *= q;
    }
    std::int64_t is = 0;
    stride = 1;
    for (std::int64_t i = 0; i < inner.site_count(); ++i) {
      is += stride * ov[static_cast<std::size_t>(outer.index_of(inner.site_at(i)))];
      stride *= q;
    }
    double composed = rest_marg[static_cast<std::size_t>(rs)] * kin[static_cast<std::size_t>(rs)].prob(is);
    worst = std::max(worst, std::abs(composed - kouter.prob(os)));
    (void)in_states;
  }
  return worst;
}

double relative_energy(const Potential& phi, const Window& volume, const Configuration& sigma,
                       const Configuration& omega) {
  Configuration plus = Configuration::constant(sigma.window(), sigma.alphabet(),
                                               sigma.alphabet().plus_symbol);
  return hamiltonian(phi, volume, plus, omega) - hamiltonian(phi, volume, sigma, omega);
}

double relative_energy(const KernelTable& kernel, const Configuration& sigma) {
  Configuration plus = Configuration::constant(sigma.window(), sigma.alphabet(),
                                               sigma.alphabet().plus_symbol);
  return kernel.log_prob(kernel.state_of(sigma)) - kernel.log_prob(kernel.state_of(plus));
}

double d_function(const Potential& phi, const Configuration& sigma) {
  Window zero(sigma.window().dim(), origin(), origin());
  return relative_energy(phi, zero, sigma, sigma);
}

double telescoping_identity_check(const Potential& phi, const Window& volume,
                                  const Configuration& sigma, const Configuration& omega) {
  double lhs = relative_energy(phi, volume, sigma, omega);
  double rhs = 0.0;
  for (std::int64_t i = 0; i < volume.site_count(); ++i) {
    Site x = volume.site_at(i);
    Configuration t = telescope_config(volume, x, sigma, omega);
    Window xw(volume.dim(), x, x);
    rhs += relative_energy(phi, xw, sigma, t);
  }
  return std::abs(lhs - rhs);
}

OscillationReport oscillate(const std::function<double(const Configuration&)>& fn,
                            const Configuration& center, const std::vector<Site>& vary_sites,
                            const std::string& id) {
  OscillationReport rep;
  rep.function_id = id;
  rep.volume = center.window();
  rep.center = center;
  const int q = center.alphabet().size();
  const std::int64_t nv = static_cast<std::int64_t>(vary_sites.size());
  const std::int64_t ns = state_count(q, nv);
  if (nv > 20) throw std::runtime_error("oscillation: annulus enumeration too large");
  std::vector<double> vals(static_cast<std::size_t>(ns));
  par::for_each_index(ns, [&](std::int64_t st) {  // each item evaluates a kernel
    Configuration ext = center;
    std::uint8_t v[64];
    decode_state(st, q, nv, v);
    for (std::int64_t k = 0; k < nv; ++k) ext.set_value(vary_sites[static_cast<std::size_t>(k)], v[k]);
    vals[static_cast<std::size_t>(st)] = fn(ext);
  });
  rep.lo = vals[0];
  rep.hi = vals[0];
  for (double v : vals) {
    rep.lo = std::min(rep.lo, v);
    rep.hi = std::max(rep.hi, v);
  }
  rep.evaluations = ns;
  return rep;
}

std::vector<Site> oscillation_vary_sites(const Window& volume, const LocalFunction& f, int range,
                                         int n) {
  // dependence region of gamma_Lambda f: (volume u supp f) expanded by the
  // range; the boundary only matters there
  Site lo = volume.lo(), hi = volume.hi();
  for (const Site& s : f.support)
    for (int k = 0; k < volume.dim(); ++k) {
      lo[k] = std::min(lo[k], s[k]);
      hi[k] = std::max(hi[k], s[k]);
    }
  Window dep = Window(volume.dim(), lo, hi).expanded(range);
  Window lam_n = Window::cube(volume.dim(), n);
  std::vector<Site> vary;
  for (const Site& s : dep.sites())
    if (!lam_n.contains(s) && !volume.contains(s)) vary.push_back(s);
  return vary;
}

OscillationReport oscillation_gibbs(const Potential& phi, const LocalFunction& f,
                                    const Window& volume, const Configuration& center, int n) {
  auto vary = oscillation_vary_sites(volume, f, phi.range(), n);
  auto fn = [&](const Configuration& boundary) {
    KernelTable k = gibbs_kernel(phi, volume, boundary);
    const std::int64_t ns = static_cast<std::int64_t>(k.probs.size());
    double acc = 0.0;
    for (std::int64_t st = 0; st < ns; ++st) {
      std::uint8_t v[64];
      decode_state(st, phi.q(), volume.site_count(), v);
      Configuration full = boundary;
      for (std::int64_t i = 0; i < volume.site_count(); ++i)
        full.set_value(volume.site_at(i), v[i]);
      acc += k.prob(st) * f.eval(full);
    }
    return acc;
  };
  OscillationReport rep = oscillate(fn, center, vary, f.id);
  rep.volume = volume;
  rep.annulus = n;
  return rep;
}

}  // namespace ggibbs

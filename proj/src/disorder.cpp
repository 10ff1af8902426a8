#include "ggibbs/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ggibbs/parallel.hpp"
#include "ggibbs/rng.hpp"

namespace ggibbs {

DisorderLaw DisorderLaw::bernoulli_occupancy(double p) {
  DisorderLaw law;
  law.kind = Kind::BernoulliOccupancy;
  law.alphabet = SpinAlphabet::occupancy();
  law.values = {0.0, 1.0};
  law.weights = {1.0 - p, p};
  law.validate();
  return law;
}

DisorderLaw DisorderLaw::symmetric_field(std::vector<double> values,
                                         std::vector<double> weights) {
  DisorderLaw law;
  law.kind = Kind::SymmetricField;
  const int q = static_cast<int>(values.size());
  for (int i = 0; i < q; ++i) {
    if (std::abs(values[static_cast<std::size_t>(i)] +
                 values[static_cast<std::size_t>(q - 1 - i)]) > 1e-12 ||
        std::abs(weights[static_cast<std::size_t>(i)] -
                 weights[static_cast<std::size_t>(q - 1 - i)]) > 1e-12)
      throw std::invalid_argument("disorder law: symmetric support and weights required");
  }
  for (int i = 0; i < q; ++i) {
    law.alphabet.symbols.push_back("h" + std::to_string(i));
  }
  law.alphabet.plus_symbol = q - 1;
  law.values = std::move(values);
  double s = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (auto& w : weights) w /= s;
  law.weights = std::move(weights);
  law.validate();
  return law;
}

void DisorderLaw::validate() const {
  alphabet.validate();
  if (static_cast<int>(weights.size()) != q() || static_cast<int>(values.size()) != q())
    throw std::invalid_argument("disorder law: size mismatch");
  for (double w : weights)
    if (!(w > 0)) throw std::invalid_argument("disorder law: zero-mass symbol rejected");
}

double DisorderLaw::log_weight(int symbol) const {
  return std::log(weights[static_cast<std::size_t>(symbol)]);
}

int DisorderLaw::sample_symbol(CounterRng& rng) const {
  double u = rng.uniform01(), acc = 0.0;
  for (int s = 0; s < q(); ++s) {
    acc += weights[static_cast<std::size_t>(s)];
    if (u < acc) return s;
  }
  return q() - 1;
}

DisorderField sample_disorder(const DisorderLaw& law, const Window& window, std::uint64_t seed,
                              int exterior_symbol) {
  CounterRng rng(seed);
  std::vector<std::uint8_t> vals(static_cast<std::size_t>(window.site_count()));
  for (auto& v : vals) v = static_cast<std::uint8_t>(law.sample_symbol(rng));
  DisorderField f;
  f.values = Configuration(window, law.alphabet, std::move(vals),
                           Exterior::constant_rule(exterior_symbol));
  f.law = law;
  f.seed = seed;
  return f;
}

SpinAlphabet JointModel::joint_alphabet() const {
  SpinAlphabet a;
  for (int e = 0; e < q_dis(); ++e)
    for (int s = 0; s < q_spin(); ++s)
      a.symbols.push_back(spin.symbols[static_cast<std::size_t>(s)] + "|" +
                          disorder.alphabet.symbols[static_cast<std::size_t>(e)]);
  a.plus_symbol = joint_sym(spin.plus_symbol, disorder.alphabet.plus_symbol);
  return a;
}

JointModel rfim_model(int dim, double beta, double h) {
  JointModel m;
  m.spin = SpinAlphabet::ising();
  m.disorder = DisorderLaw::symmetric_field({-1.0, 1.0}, {0.5, 0.5});
  const int qj = m.q_joint();
  Potential joint(qj, dim);
  for (int k = 0; k < dim; ++k) {
    Site e{};
    e[k] = 1;
    std::vector<double> tab(static_cast<std::size_t>(qj) * qj);
    for (int a = 0; a < qj; ++a)
      for (int b = 0; b < qj; ++b)
        tab[static_cast<std::size_t>(a + qj * b)] =
            -beta * ising_value(m.spin_of(a)) * ising_value(m.spin_of(b));
    joint.add_ti_term({origin(), e}, std::move(tab));
  }
  if (h != 0.0) {
    std::vector<double> tab(static_cast<std::size_t>(qj));
    for (int a = 0; a < qj; ++a)
      tab[static_cast<std::size_t>(a)] =
          -h * m.disorder.values[static_cast<std::size_t>(m.dis_of(a))] *
          ising_value(m.spin_of(a));
    joint.add_ti_term({origin()}, std::move(tab));
  }
  m.joint = std::move(joint);
  return m;
}

Potential quench(const JointModel& model, const Configuration& eta, const Window& region) {
  const int qs = model.q_spin();
  Potential out(qs, model.joint.dim());
  Window anchors = region.expanded(model.joint.range());
  for (std::int64_t i = 0; i < anchors.site_count(); ++i) {
    Site x = anchors.site_at(i);
    for (const Term& t : model.joint.ti_terms()) {
      bool meets = false;
      std::vector<Site> abs;
      abs.reserve(t.shape.sites.size());
      for (const Site& b : t.shape.sites) {
        Site s = add(b, x);
        abs.push_back(s);
        if (region.contains(s)) meets = true;
      }
      if (!meets) continue;
      // partial-evaluate the joint table at the frozen disorder symbols
      const int k = t.shape.size();
      std::vector<int> esym(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j) esym[static_cast<std::size_t>(j)] = eta.value_at(abs[static_cast<std::size_t>(j)]);
      std::vector<double> tab(static_cast<std::size_t>(state_count(qs, k)));
      std::vector<std::uint8_t> sv(static_cast<std::size_t>(k));
      for (std::int64_t st = 0; st < static_cast<std::int64_t>(tab.size()); ++st) {
        decode_state(st, qs, k, sv.data());
        std::int64_t ji = 0, stride = 1;
        for (int j = 0; j < k; ++j) {
          ji += stride * model.joint_sym(sv[static_cast<std::size_t>(j)], esym[static_cast<std::size_t>(j)]);
          stride *= model.q_joint();
        }
        tab[static_cast<std::size_t>(st)] = t.table[static_cast<std::size_t>(ji)];
      }
      out.add_anchored_term(x, t.shape.sites, std::move(tab));
    }
  }
  return out;
}

KernelTable quenched_kernel(const JointModel& model, const Configuration& eta,
                            const Window& volume, const Configuration& sigma_boundary) {
  Potential phi = quench(model, eta, volume);
  return gibbs_kernel(phi, volume, sigma_boundary);
}

ExactMeasure joint_measure_exact(const JointModel& model, const Window& window,
                                 int sigma_bc_symbol, int eta_exterior_symbol) {
  const int qs = model.q_spin();
  const int qe = model.q_dis();
  const int qj = model.q_joint();
  const std::int64_t n = window.site_count();
  const std::int64_t eta_states = state_count(qe, n);
  const std::int64_t sig_states = state_count(qs, n);
  state_count(qj, n);  // guard the output size
  std::vector<double> probs(static_cast<std::size_t>(state_count(qj, n)), 0.0);

  Configuration sigma_bc =
      Configuration::constant(window.expanded(model.joint.range()), model.spin, sigma_bc_symbol);
  par::for_each_index(eta_states, [&](std::int64_t es) {
    std::vector<std::uint8_t> ev(static_cast<std::size_t>(n));
    decode_state(es, qe, n, ev.data());
    double lp_eta = 0.0;
    for (auto e : ev) lp_eta += model.disorder.log_weight(e);
    Configuration eta(window, model.disorder.alphabet, ev,
                      Exterior::constant_rule(eta_exterior_symbol));
    KernelTable mu = quenched_kernel(model, eta, window, sigma_bc);
    std::vector<std::uint8_t> sv(static_cast<std::size_t>(n));
    for (std::int64_t ss = 0; ss < sig_states; ++ss) {
      decode_state(ss, qs, n, sv.data());
      std::int64_t js = 0, stride = 1;
      for (std::int64_t k = 0; k < n; ++k) {
        js += stride * model.joint_sym(sv[static_cast<std::size_t>(k)], ev[static_cast<std::size_t>(k)]);
        stride *= qj;
      }
      probs[static_cast<std::size_t>(js)] = std::exp(lp_eta) * mu.prob(ss);
    }
  });
  return ExactMeasure(window, qj, std::move(probs));
}

JointSampleSet joint_measure_mc(const JointModel& model, const Window& window,
                                int sigma_bc_symbol, int eta_exterior_symbol,
                                std::uint64_t seed, int sweeps, int burn_in, int replicas) {
  JointSampleSet out;
  out.seed = seed;
  out.spins.window = window;
  out.spins.q = model.q_spin();
  out.spins.sampler_id = std::string("joint-heat-bath/") + CounterRng::name();
  out.spins.seed = seed;
  out.spins.sweeps = sweeps;
  out.spins.burn_in = burn_in;
  for (int rep = 0; rep < replicas; ++rep) {
    std::uint64_t rs = CounterRng::derive(seed, static_cast<std::uint64_t>(rep));
    DisorderField eta = sample_disorder(model.disorder, window, CounterRng::derive(rs, 0),
                                        eta_exterior_symbol);
    Potential phi = quench(model, eta.values, window);
    Configuration bc =
        Configuration::constant(window.expanded(model.joint.range()), model.spin, sigma_bc_symbol);
    SampleSet run = gibbs_sampler(phi, window, Boundary::fixed(bc), CounterRng::derive(rs, 1),
                                  sweeps, burn_in, 1);
    for (auto& s : run.samples) {
      out.spins.samples.push_back(std::move(s));
      out.etas.push_back(eta.values.values());
    }
  }
  return out;
}

KernelTable joint_conditional_kernel(const JointModel& model, const Window& volume,
                                     const Configuration& xi_boundary, int margin,
                                     int sigma_bc_symbol) {
  const int qs = model.q_spin();
  const int qe = model.q_dis();
  const int qj = model.q_joint();
  const std::int64_t n = volume.site_count();

  // trivial annealed potential U = Phi - 1_{A={x}} log P0(eta_x)
  Potential annealed = model.joint;
  {
    std::vector<double> tab(static_cast<std::size_t>(qj));
    for (int j = 0; j < qj; ++j)
      tab[static_cast<std::size_t>(j)] = -model.disorder.log_weight(model.dis_of(j));
    annealed.add_ti_term({origin()}, std::move(tab));
  }
  KernelTable ann = gibbs_kernel(annealed, volume, xi_boundary);

  // annealed marginal on the disorder layer
  const std::int64_t eta_states = state_count(qe, n);
  const std::int64_t sig_states = state_count(qs, n);
  std::vector<double> log_annd(static_cast<std::size_t>(eta_states));
  {
    std::vector<std::uint8_t> ev(static_cast<std::size_t>(n)), sv(static_cast<std::size_t>(n));
    for (std::int64_t es = 0; es < eta_states; ++es) {
      decode_state(es, qe, n, ev.data());
      double acc = 0.0;
      for (std::int64_t ss = 0; ss < sig_states; ++ss) {
        decode_state(ss, qs, n, sv.data());
        std::int64_t js = 0, stride = 1;
        for (std::int64_t k = 0; k < n; ++k) {
          js += stride * model.joint_sym(sv[static_cast<std::size_t>(k)], ev[static_cast<std::size_t>(k)]);
          stride *= qj;
        }
        acc += ann.prob(js);
      }
      log_annd[static_cast<std::size_t>(es)] = std::log(acc);
    }
  }

  // the eta-part of the boundary off the volume
  const Window region = volume.expanded(margin);
  auto eta_config_for = [&](const std::vector<std::uint8_t>& eta_vol) {
    // eta: inside volume from eta_vol, elsewhere the eta-part of xi_boundary
    Window ew = xi_boundary.window();
    std::vector<std::uint8_t> ev(static_cast<std::size_t>(ew.site_count()));
    for (std::int64_t i = 0; i < ew.site_count(); ++i) {
      Site s = ew.site_at(i);
      if (volume.contains(s))
        ev[static_cast<std::size_t>(i)] =
            eta_vol[static_cast<std::size_t>(volume.index_of(s))];
      else
        ev[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>(model.dis_of(xi_boundary.value_index(i)));
    }
    Exterior ext =
        Exterior::constant_rule(model.dis_of(xi_boundary.exterior().value_at(
            ew.hi(), ew.dim())));  // constant joint exteriors decompose sitewise
    return Configuration(ew, model.disorder.alphabet, std::move(ev), ext);
  };

  // Q(eta1, eta2) = mu[eta2 eta_off](exp(-Delta H(eta1, eta2))) with the
  // quenched measure realized on `region` with the fixed spin boundary
  Configuration spin_bc =
      Configuration::constant(region.expanded(model.joint.range()), model.spin, sigma_bc_symbol);
  std::vector<std::vector<std::uint8_t>> eta_vols(static_cast<std::size_t>(eta_states));
  for (std::int64_t es = 0; es < eta_states; ++es) {
    eta_vols[static_cast<std::size_t>(es)].resize(static_cast<std::size_t>(n));
    decode_state(es, qe, n, eta_vols[static_cast<std::size_t>(es)].data());
  }

  std::vector<double> log_q(static_cast<std::size_t>(eta_states * eta_states));
  par::for_each_index(eta_states, [&](std::int64_t e2) {
    Configuration eta2 = eta_config_for(eta_vols[static_cast<std::size_t>(e2)]);
    Potential phi2 = quench(model, eta2, region);
    ExactMeasure mu2 = finite_gibbs(phi2, region, Boundary::fixed(spin_bc));
    const std::int64_t rn = region.site_count();
    std::vector<std::uint8_t> rv(static_cast<std::size_t>(rn));
    for (std::int64_t e1 = 0; e1 < eta_states; ++e1) {
      Configuration eta1 = eta_config_for(eta_vols[static_cast<std::size_t>(e1)]);
      Potential phi1 = quench(model, eta1, region);
      // log E[exp(-(H1 - H2))] over mu2; both Hamiltonians run over terms
      // meeting the volume
      double lse = -std::numeric_limits<double>::infinity();
      double sum = 0.0;
      for (std::int64_t ss = 0; ss < mu2.n_states(); ++ss) {
        decode_state(ss, qs, rn, rv.data());
        Configuration sig(region, model.spin, std::vector<std::uint8_t>(rv.begin(), rv.end()),
                          Exterior::constant_rule(sigma_bc_symbol));
        double dh = hamiltonian(phi1, volume, sig, sig) - hamiltonian(phi2, volume, sig, sig);
        double x = mu2.log_prob(ss) - dh;
        if (x <= lse) {
          sum += std::exp(x - lse);
        } else {
          sum = sum * std::exp(lse - x) + 1.0;
          lse = x;
        }
      }
      log_q[static_cast<std::size_t>(e1 * eta_states + e2)] = lse + std::log(sum);
    }
  });

  // denominator per eta1 and the assembled kernel
  std::vector<double> log_den(static_cast<std::size_t>(eta_states));
  for (std::int64_t e1 = 0; e1 < eta_states; ++e1) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::int64_t e2 = 0; e2 < eta_states; ++e2)
      m = std::max(m, log_annd[static_cast<std::size_t>(e2)] +
                          log_q[static_cast<std::size_t>(e1 * eta_states + e2)]);
    double s = 0.0;
    for (std::int64_t e2 = 0; e2 < eta_states; ++e2)
      s += std::exp(log_annd[static_cast<std::size_t>(e2)] +
                    log_q[static_cast<std::size_t>(e1 * eta_states + e2)] - m);
    log_den[static_cast<std::size_t>(e1)] = m + std::log(s);
  }

  KernelTable out;
  out.volume = volume;
  out.boundary = xi_boundary;
  const std::int64_t joint_states = state_count(qj, n);
  out.log_probs.resize(static_cast<std::size_t>(joint_states));
  std::vector<std::uint8_t> jv(static_cast<std::size_t>(n));
  for (std::int64_t js = 0; js < joint_states; ++js) {
    decode_state(js, qj, n, jv.data());
    std::int64_t es = 0, stride = 1;
    for (std::int64_t k = 0; k < n; ++k) {
      es += stride * model.dis_of(jv[static_cast<std::size_t>(k)]);
      stride *= qe;
    }
    out.log_probs[static_cast<std::size_t>(js)] =
        ann.log_prob(js) - log_den[static_cast<std::size_t>(es)];
  }
  double m = *std::max_element(out.log_probs.begin(), out.log_probs.end());
  double s = 0.0;
  for (double lp : out.log_probs) s += std::exp(lp - m);
  double lz = m + std::log(s);
  out.probs.resize(out.log_probs.size());
  for (std::size_t i = 0; i < out.log_probs.size(); ++i) {
    out.log_probs[i] -= lz;
    out.probs[i] = std::exp(out.log_probs[i]);
  }
  return out;
}

std::vector<JointBoundRow> joint_entropy_bound_check(const JointModel& model,
                                                     const std::vector<Window>& windows,
                                                     int eta_exterior_symbol) {
  std::vector<JointBoundRow> rows;
  const double c1 = uac_norm(model.joint).per_site_norm;
  const int plus = model.spin.plus_symbol;
  for (const Window& w : windows) {
    ExactMeasure kp = joint_measure_exact(model, w, plus, eta_exterior_symbol);
    ExactMeasure km = joint_measure_exact(model, w, 0, eta_exterior_symbol);
    JointBoundRow row;
    row.volume = w.site_count();
    row.boundary = w.expanded(model.joint.range()).site_count() - w.site_count();
    Ent h = relative_entropy_fv(kp, km);
    row.h_fv = h.infinite ? std::numeric_limits<double>::infinity() : h.value;
    double sup = 0.0;
    for (std::int64_t s = 0; s < kp.n_states(); ++s)
      sup = std::max(sup, std::abs(std::log(kp.prob(s) / km.prob(s))));
    row.sup_log_ratio = sup;
    row.bound_entropy = 4.0 * c1 * static_cast<double>(row.boundary);
    row.bound_log_ratio = 8.0 * c1 * static_cast<double>(row.boundary);
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::vector<std::uint8_t>> ad_cylinder_family(int q, int len, std::uint64_t seed) {
  std::vector<std::vector<std::uint8_t>> fam;
  fam.emplace_back(static_cast<std::size_t>(len), static_cast<std::uint8_t>(q - 1));
  fam.emplace_back(static_cast<std::size_t>(len), static_cast<std::uint8_t>(0));
  std::vector<std::uint8_t> alt(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i) alt[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i % 2 ? q - 1 : 0);
  fam.push_back(std::move(alt));
  CounterRng rng(seed);
  std::vector<std::uint8_t> rnd(static_cast<std::size_t>(len));
  for (auto& v : rnd) v = static_cast<std::uint8_t>(rng.uniform_int(q));
  fam.push_back(std::move(rnd));
  return fam;
}

AdRow ad_check_product(const std::vector<double>& weights, int block_len, int gap,
                       std::uint64_t seed) {
  AdRow row;
  row.family = "product";
  row.block_len = block_len;
  row.gap = gap;
  row.c_n = 0.0;
  row.envelope = 0.0;
  const int q = static_cast<int>(weights.size());
  auto fam = ad_cylinder_family(q, block_len, seed);
  double lo = 0.0, hi = 0.0;
  for (const auto& a : fam)
    for (const auto& b : fam) {
      auto lp = [&](const std::vector<std::uint8_t>& v) {
        double s = 0.0;
        for (auto x : v) s += std::log(weights[x]);
        return s;
      };
      double la = lp(a), lb = lp(b);
      double lab = 0.0;
      for (auto x : a) lab += std::log(weights[x]);
      for (auto x : b) lab += std::log(weights[x]);
      double r = lab - la - lb;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      ++row.pairs;
    }
  row.min_log_ratio = lo;
  row.max_log_ratio = hi;
  return row;
}

AdRow ad_check_chain(const TransferChain& chain, int block_len, int gap, std::uint64_t seed) {
  AdRow row;
  row.family = "chain";
  row.block_len = block_len;
  row.gap = gap;
  row.c_n = chain.ad_log_ratio_bound(gap);
  row.envelope = row.c_n;
  auto fam = ad_cylinder_family(chain.q(), block_len, seed);
  double lo = 0.0, hi = 0.0;
  for (const auto& a : fam)
    for (const auto& b : fam) {
      double la = chain.log_block(block_len, 0, block_len, a.data());
      double lb = chain.log_block(block_len, 0, block_len, b.data());
      double lab = chain.log_two_blocks(block_len, a.data(), gap, block_len, b.data());
      double r = lab - la - lb;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      ++row.pairs;
    }
  row.min_log_ratio = lo;
  row.max_log_ratio = hi;
  return row;
}

AdRow ad_check_joint(const JointModel& model, int total, int block_len, int gap,
                     int sigma_bc_symbol, int eta_exterior_symbol, std::uint64_t seed) {
  AdRow row;
  row.family = "joint-rfim";
  row.block_len = block_len;
  row.gap = gap;
  const double c1 = uac_norm(model.joint).per_site_norm;
  row.c_n = 0.0;  // i.i.d. disorder decouples exactly
  row.envelope = row.c_n + 8.0 * c1 * 2.0;  // |dLambda_n| = 2 in d = 1
  Window w = Window::interval(0, total - 1);
  ExactMeasure k = joint_measure_exact(model, w, sigma_bc_symbol, eta_exterior_symbol);
  std::vector<Site> asites, bsites;
  for (int i = 0; i < block_len; ++i) asites.push_back(site1(i));
  for (int i = block_len + gap; i < total; ++i) bsites.push_back(site1(i));
  if (bsites.empty()) throw std::invalid_argument("ad_check_joint: no room for the far block");
  std::vector<Site> all = asites;
  all.insert(all.end(), bsites.begin(), bsites.end());
  auto ma = k.marginal_sites(asites);
  auto mb = k.marginal_sites(bsites);
  auto mab = k.marginal_sites(all);
  const int qj = model.q_joint();
  auto fam_a = ad_cylinder_family(qj, static_cast<int>(asites.size()), seed);
  auto fam_b = ad_cylinder_family(qj, static_cast<int>(bsites.size()), seed + 1);
  double lo = 0.0, hi = 0.0;
  for (const auto& a : fam_a)
    for (const auto& b : fam_b) {
      double pa = ma[static_cast<std::size_t>(encode_state(qj, static_cast<std::int64_t>(a.size()), a.data()))];
      double pb = mb[static_cast<std::size_t>(encode_state(qj, static_cast<std::int64_t>(b.size()), b.data()))];
      std::vector<std::uint8_t> abv = a;
      abv.insert(abv.end(), b.begin(), b.end());
      double pab = mab[static_cast<std::size_t>(encode_state(qj, static_cast<std::int64_t>(abv.size()), abv.data()))];
      if (pa <= 0 || pb <= 0) {
        ++row.skipped;
        continue;
      }
      double r = std::log(pab) - std::log(pa) - std::log(pb);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      ++row.pairs;
    }
  row.min_log_ratio = lo;
  row.max_log_ratio = hi;
  return row;
}

std::vector<CorrRow> quenched_correlation_decay(const JointModel& model,
                                                const std::vector<int>& ms, const Window& window,
                                                const Boundary& bc, int replicas,
                                                std::uint64_t seed, int eta_exterior_symbol,
                                                std::vector<std::vector<double>>* per_replica_out) {
  std::vector<std::vector<double>> per_replica(static_cast<std::size_t>(replicas));
  par::for_each_index(replicas, [&](std::int64_t rep) {
    DisorderField eta =
        sample_disorder(model.disorder, window.expanded(model.joint.range()),
                        CounterRng::derive(seed, static_cast<std::uint64_t>(rep)),
                        eta_exterior_symbol);
    Potential phi = quench(model, eta.values, window);
    ExactMeasure mu = finite_gibbs(phi, window, bc);
    std::vector<double>& out = per_replica[static_cast<std::size_t>(rep)];
    for (int m : ms) {
      Site x = window.lo();
      Site y = x;
      y[0] += m;
      if (!window.contains(y)) throw std::invalid_argument("corr decay: m exceeds the window");
      std::int64_t ix = window.index_of(x), iy = window.index_of(y);
      double sxy = mu.expectation([&](const std::uint8_t* v) {
        return ising_value(v[ix]) * ising_value(v[iy]);
      });
      double sx = mu.expectation([&](const std::uint8_t* v) { return ising_value(v[ix]); });
      double sy = mu.expectation([&](const std::uint8_t* v) { return ising_value(v[iy]); });
      out.push_back(std::abs(sxy - sx * sy));
    }
  });
  std::vector<CorrRow> rows;
  for (std::size_t k = 0; k < ms.size(); ++k) {
    double s1 = 0.0, s2 = 0.0;
    for (int rep = 0; rep < replicas; ++rep) {
      double v = per_replica[static_cast<std::size_t>(rep)][k];
      s1 += v;
      s2 += v * v;
    }
    CorrRow row;
    row.m = ms[k];
    row.replicas = replicas;
    row.mean = s1 / replicas;
    double var = std::max(0.0, s2 / replicas - row.mean * row.mean);
    row.se = replicas > 1 ? std::sqrt(var / replicas) : 0.0;
    rows.push_back(row);
  }
  if (per_replica_out) *per_replica_out = per_replica;
  return rows;
}

// --- GriSing ----------------------------------------------------------------

namespace {

// plain union-find with path compression
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

std::vector<std::vector<std::int64_t>> occupied_clusters(const Window& w,
                                                         const std::vector<std::uint8_t>& occ) {
  UnionFind uf(static_cast<int>(w.site_count()));
  for (std::int64_t i = 0; i < w.site_count(); ++i) {
    if (!occ[static_cast<std::size_t>(i)]) continue;
    Site s = w.site_at(i);
    for (int k = 0; k < w.dim(); ++k) {
      Site t = s;
      t[k] += 1;
      if (w.contains(t) && occ[static_cast<std::size_t>(w.index_of(t))])
        uf.unite(static_cast<int>(i), static_cast<int>(w.index_of(t)));
    }
  }
  std::vector<std::vector<std::int64_t>> clusters;
  std::vector<int> label(static_cast<std::size_t>(w.site_count()), -1);
  for (std::int64_t i = 0; i < w.site_count(); ++i) {
    if (!occ[static_cast<std::size_t>(i)]) continue;
    int root = uf.find(static_cast<int>(i));
    if (label[static_cast<std::size_t>(root)] < 0) {
      label[static_cast<std::size_t>(root)] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(label[static_cast<std::size_t>(root)])].push_back(i);
  }
  return clusters;
}

// free-boundary Ising weights on a cluster: bonds inside the cluster only
std::vector<double> cluster_log_weights(const Window& w, const std::vector<std::int64_t>& cluster,
                                        double beta) {
  const int k = static_cast<int>(cluster.size());
  std::vector<std::pair<int, int>> bonds;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      if (chebyshev(w.site_at(cluster[static_cast<std::size_t>(a)]),
                    w.site_at(cluster[static_cast<std::size_t>(b)]), w.dim()) == 1) {
        // nearest neighbours differ in exactly one coordinate by one
        Site d = sub(w.site_at(cluster[static_cast<std::size_t>(a)]),
                     w.site_at(cluster[static_cast<std::size_t>(b)]));
        int nz = 0;
        for (int c = 0; c < w.dim(); ++c) nz += d[c] != 0;
        if (nz == 1) bonds.emplace_back(a, b);
      }
  std::vector<double> logw(static_cast<std::size_t>(state_count(2, k)));
  std::vector<std::uint8_t> v(static_cast<std::size_t>(k));
  for (std::int64_t st = 0; st < static_cast<std::int64_t>(logw.size()); ++st) {
    decode_state(st, 2, k, v.data());
    double e = 0.0;
    for (auto [a, b] : bonds)
      e += beta * ising_value(v[static_cast<std::size_t>(a)]) * ising_value(v[static_cast<std::size_t>(b)]);
    logw[static_cast<std::size_t>(st)] = e;
  }
  return logw;
}

}  // namespace

GrisingSample grising_sample(double p, double beta, const Window& window, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("grising: p in (0,1) required");
  CounterRng rng(seed);
  const std::int64_t n = window.site_count();
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(n));
  for (auto& v : occ) v = rng.uniform01() < p ? 1 : 0;

  std::vector<std::uint8_t> spins(static_cast<std::size_t>(n), 1);
  auto clusters = occupied_clusters(window, occ);
  for (const auto& cluster : clusters) {
    const int k = static_cast<int>(cluster.size());
    if (k <= 20) {
      // exact sampling from the free-boundary cluster measure
      auto logw = cluster_log_weights(window, cluster, beta);
      double mx = *std::max_element(logw.begin(), logw.end());
      double z = 0.0;
      for (double lw : logw) z += std::exp(lw - mx);
      double u = rng.uniform01() * z, acc = 0.0;
      std::int64_t pick = static_cast<std::int64_t>(logw.size()) - 1;
      for (std::int64_t st = 0; st < static_cast<std::int64_t>(logw.size()); ++st) {
        acc += std::exp(logw[static_cast<std::size_t>(st)] - mx);
        if (u < acc) {
          pick = st;
          break;
        }
      }
      std::vector<std::uint8_t> v(static_cast<std::size_t>(k));
      decode_state(pick, 2, k, v.data());
      for (int i = 0; i < k; ++i)
        spins[static_cast<std::size_t>(cluster[static_cast<std::size_t>(i)])] = v[static_cast<std::size_t>(i)];
    } else {
      // cluster-wise heat bath; sweeps scale with the cluster size
      std::vector<std::uint8_t> v(static_cast<std::size_t>(k), 1);
      const int sweeps = 200 + 20 * k;
      for (int sweep = 0; sweep < sweeps; ++sweep)
        for (int i = 0; i < k; ++i) {
          double field = 0.0;
          Site si = window.site_at(cluster[static_cast<std::size_t>(i)]);
          for (int j = 0; j < k; ++j) {
            if (j == i) continue;
            Site sj = window.site_at(cluster[static_cast<std::size_t>(j)]);
            Site d = sub(si, sj);
            int nz = 0, sum = 0;
            for (int c = 0; c < window.dim(); ++c) {
              nz += d[c] != 0;
              sum += std::abs(d[c]);
            }
            if (nz == 1 && sum == 1) field += ising_value(v[static_cast<std::size_t>(j)]);
          }
          double pplus = 1.0 / (1.0 + std::exp(-2.0 * beta * field));
          v[static_cast<std::size_t>(i)] = rng.uniform01() < pplus ? 1 : 0;
        }
      for (int i = 0; i < k; ++i)
        spins[static_cast<std::size_t>(cluster[static_cast<std::size_t>(i)])] = v[static_cast<std::size_t>(i)];
    }
  }

  // xi = sigma * eta over {-,0,+}
  std::vector<std::uint8_t> xi(static_cast<std::size_t>(n));
  std::int64_t occupied = 0, touching = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    if (!occ[static_cast<std::size_t>(i)]) {
      xi[static_cast<std::size_t>(i)] = 1;  // "0" symbol
      continue;
    }
    ++occupied;
    Site s = window.site_at(i);
    for (int k = 0; k < window.dim(); ++k)
      if (s[k] == window.lo()[k] || s[k] == window.hi()[k]) {
        ++touching;
        break;
      }
    xi[static_cast<std::size_t>(i)] = spins[static_cast<std::size_t>(i)] ? 2 : 0;
  }

  GrisingSample out;
  out.joint.sigma = Configuration(window, SpinAlphabet::ising(), spins, Exterior::constant_rule(1));
  out.joint.eta.values =
      Configuration(window, SpinAlphabet::occupancy(), occ, Exterior::constant_rule(0));
  out.joint.eta.law = DisorderLaw::bernoulli_occupancy(p);
  out.joint.eta.seed = seed;
  out.xi = Configuration(window, SpinAlphabet::signed_field(), xi, Exterior::constant_rule(1));
  out.boundary_touch_fraction = occupied ? static_cast<double>(touching) / occupied : 0.0;
  out.seed = seed;
  return out;
}

double grising_log_cylinder(double p, double beta, const Configuration& xi_block) {
  const Window& w = xi_block.window();
  const std::int64_t n = w.site_count();
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(n));
  double lp = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    occ[static_cast<std::size_t>(i)] = xi_block.value_index(i) != 1;
    lp += occ[static_cast<std::size_t>(i)] ? std::log(p) : std::log(1.0 - p);
  }
  for (const auto& cluster : occupied_clusters(w, occ)) {
    const int k = static_cast<int>(cluster.size());
    if (k > 20) throw std::runtime_error("grising cylinder: cluster too large to enumerate");
    auto logw = cluster_log_weights(w, cluster, beta);
    std::vector<std::uint8_t> v(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
      v[static_cast<std::size_t>(i)] =
          xi_block.value_index(cluster[static_cast<std::size_t>(i)]) == 2 ? 1 : 0;
    double mx = *std::max_element(logw.begin(), logw.end());
    double z = 0.0;
    for (double lw : logw) z += std::exp(lw - mx);
    lp += logw[static_cast<std::size_t>(encode_state(2, k, v.data()))] - mx - std::log(z);
  }
  return lp;
}

double grising_zero_block_rate(double p, const Window& window) {
  Configuration zeros = Configuration::constant(window, SpinAlphabet::signed_field(), 1);
  return grising_log_cylinder(p, 0.0, zeros) / static_cast<double>(window.site_count());
}

IncompatibilityReport rfim_incompatibility(const JointModel& model, const Window& ambient,
                                           int margin, int eta_exterior_symbol) {
  const int qj = model.q_joint();
  const std::int64_t n = ambient.site_count();
  Site x{};
  for (int k = 0; k < ambient.dim(); ++k)
    x[k] = (ambient.lo()[k] + ambient.hi()[k]) / 2;
  Window xw(ambient.dim(), x, x);
  std::vector<Site> nbrs;
  for (int k = 0; k < ambient.dim(); ++k) {
    for (int s : {-1, 1}) {
      Site y = x;
      y[k] += s;
      if (!ambient.contains(y))
        throw std::invalid_argument("incompatibility: ambient too small around x");
      nbrs.push_back(y);
    }
  }
  const int plus = model.spin.plus_symbol;
  const int eta_plus = model.disorder.alphabet.plus_symbol;

  ExactMeasure kp = joint_measure_exact(model, ambient, plus, eta_exterior_symbol);
  auto in_B = [&](const std::uint8_t* jv) {
    if (model.dis_of(jv[ambient.index_of(x)]) != eta_plus) return false;
    double s = 0.0;
    for (const Site& y : nbrs) s += ising_value(model.spin_of(jv[ambient.index_of(y)]));
    return s == 0.0;
  };

  IncompatibilityReport rep;
  rep.margin = margin;
  std::vector<std::uint8_t> jv(static_cast<std::size_t>(n));
  for (std::int64_t st = 0; st < kp.n_states(); ++st) {
    decode_state(st, qj, n, jv.data());
    if (in_B(jv.data())) rep.k_plus_direct += kp.prob(st);
  }

  // mixed: resample the joint variables at x from the K- conditional kernel
  const std::int64_t ix = ambient.index_of(x);
  double mixed = 0.0;
  for (std::int64_t st = 0; st < kp.n_states(); ++st) {
    decode_state(st, qj, n, jv.data());
    if (jv[static_cast<std::size_t>(ix)] != 0) continue;  // one representative per xi_{x^c}
    // weight of this exterior assignment under K+
    double wext = 0.0;
    for (int j = 0; j < qj; ++j) {
      jv[static_cast<std::size_t>(ix)] = static_cast<std::uint8_t>(j);
      wext += kp.prob(encode_state(qj, n, jv.data()));
    }
    if (wext == 0.0) continue;
    // the neighbour spins decide whether B can hold at all
    double s = 0.0;
    for (const Site& y : nbrs) s += ising_value(model.spin_of(jv[ambient.index_of(y)]));
    if (s != 0.0) continue;
    jv[static_cast<std::size_t>(ix)] = 0;
    Configuration xi(ambient, model.joint_alphabet(),
                     std::vector<std::uint8_t>(jv.begin(), jv.end()),
                     Exterior::constant_rule(
                         model.joint_sym(0, eta_exterior_symbol)));
    KernelTable kminus = joint_conditional_kernel(model, xw, xi, margin, 0);
    double pb = 0.0;
    for (int sspin = 0; sspin < model.q_spin(); ++sspin)
      pb += kminus.prob(model.joint_sym(sspin, eta_plus));
    mixed += wext * pb;
  }
  rep.k_mixed = mixed;
  rep.gap = std::abs(rep.k_plus_direct - rep.k_mixed);
  return rep;
}

}  // namespace ggibbs

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ggibbs/measure.hpp"
#include "ggibbs/potential.hpp"
#include "ggibbs/rng.hpp"
#include "ggibbs/specification.hpp"
#include "ggibbs/transfer.hpp"

using namespace ggibbs;

TEST_CASE("finite_gibbs closed forms and kernel sharing") {
  // beta = 0 is uniform
  auto mu0 = finite_gibbs(zero_potential(2, 1), Window::interval(0, 2), Boundary::free_bc());
  for (std::int64_t s = 0; s < 8; ++s) CHECK(mu0.prob(s) == doctest::Approx(0.125).epsilon(1e-14));
  mu0.validate();

  // single site with field h: P(+) = e^h / (e^h + e^{-h})
  double h = 0.4;
  auto muh = finite_gibbs(ising_potential(1, 0.0, h), Window::interval(0, 0),
                          Boundary::free_bc());
  CHECK(muh.prob(1) == doctest::Approx(std::exp(h) / (2 * std::cosh(h))).epsilon(1e-14));

  // Fixed boundary: table equals the kernel bit for bit
  auto phi = ising_potential(1, 0.8, 0.1);
  Window vol = Window::interval(0, 3);
  auto omega = Configuration::constant(vol.expanded(1), SpinAlphabet::ising(), 1);
  auto mu = finite_gibbs(phi, vol, Boundary::fixed(omega));
  auto k = gibbs_kernel(phi, vol, omega);
  for (std::int64_t s = 0; s < mu.n_states(); ++s) CHECK(mu.prob(s) == k.prob(s));
}

TEST_CASE("marginal") {
  Window w = Window::interval(0, 3);
  auto mu = ExactMeasure::product(w, {0.7, 0.3});
  // sub = window is the identity
  auto same = mu.marginal(w);
  for (std::int64_t s = 0; s < mu.n_states(); ++s)
    CHECK(same.prob(s) == doctest::Approx(mu.prob(s)).epsilon(1e-15));
  // product measures restrict to products
  auto m2 = mu.marginal(Window::interval(1, 2));
  CHECK(m2.prob(0) == doctest::Approx(0.49).epsilon(1e-14));
  CHECK(m2.prob(3) == doctest::Approx(0.09).epsilon(1e-14));
}

TEST_CASE("transfer chain: bulk marginals, consistency, correlations") {
  double beta = 0.8;
  auto chain = TransferChain::from_potential(ising_potential(1, beta, 0.0));

  // two-point function of the bulk chain: tanh^m beta
  std::vector<double> spin = {-1.0, 1.0};
  for (int m = 1; m <= 6; ++m)
    CHECK(chain.two_point(m, spin) == doctest::Approx(std::pow(std::tanh(beta), m)).epsilon(1e-12));
  CHECK(chain.one_point(spin) == doctest::Approx(0.0).epsilon(1e-13));

  // marginal consistency of the infinite-volume chain
  auto m5 = chain.marginal(5);
  m5.validate(1e-12);
  auto m7 = chain.marginal(7);
  auto mid = m7.marginal(Window::interval(1, 5));
  for (std::int64_t s = 0; s < m5.n_states(); ++s)
    CHECK(mid.prob(s) == doctest::Approx(m5.prob(s)).epsilon(1e-12));

  // two-point from the table agrees with the closed form
  double c2 = m5.expectation([&](const std::uint8_t* v) {
    return ising_value(v[0]) * ising_value(v[3]);
  });
  CHECK(c2 == doctest::Approx(std::pow(std::tanh(beta), 3)).epsilon(1e-12));
}

TEST_CASE("transfer chain cylinders match brute-force enumeration") {
  double beta = 0.8, h = 0.25;
  auto phi = ising_potential(1, beta, h);

  // free boundary, n <= 12
  for (int n : {1, 2, 5, 9, 12}) {
    auto chain = TransferChain::from_potential(phi);
    chain.set_edges(TransferChain::Edge::Free, TransferChain::Edge::Free);
    auto brute = finite_gibbs(phi, Window::interval(0, n - 1), Boundary::free_bc());
    auto tm = chain.marginal(n);
    for (std::int64_t s = 0; s < brute.n_states(); ++s)
      CHECK(tm.prob(s) == doctest::Approx(brute.prob(s)).epsilon(1e-10));
  }

  // fixed +/- edges
  for (int left : {0, 1})
    for (int right : {0, 1}) {
      int n = 6;
      auto chain = TransferChain::from_potential(phi);
      chain.set_edges(TransferChain::Edge::Fixed, TransferChain::Edge::Fixed, left, right);
      Window vol = Window::interval(0, n - 1);
      auto omega = Configuration::constant(vol.expanded(1), SpinAlphabet::ising(), 1);
      omega.set_value(site1(-1), left);
      omega.set_value(site1(n), right);
      auto brute = finite_gibbs(phi, vol, Boundary::fixed(omega));
      auto tm = chain.marginal(n);
      for (std::int64_t s = 0; s < brute.n_states(); ++s)
        CHECK(tm.prob(s) == doctest::Approx(brute.prob(s)).epsilon(1e-10));
    }

  // sub-block cylinders: marginal of the full table
  {
    int n = 8;
    auto chain = TransferChain::from_potential(phi);
    chain.set_edges(TransferChain::Edge::Free, TransferChain::Edge::Free);
    auto brute = finite_gibbs(phi, Window::interval(0, n - 1), Boundary::free_bc());
    auto sub = brute.marginal(Window::interval(2, 4));
    std::vector<std::uint8_t> blk(3);
    for (std::int64_t s = 0; s < 8; ++s) {
      decode_state(s, 2, 3, blk.data());
      CHECK(chain.cylinder_prob(n, 2, blk) == doctest::Approx(sub.prob(s)).epsilon(1e-10));
    }
  }
}

TEST_CASE("chain cylinder closed forms") {
  // Bernoulli(p) chain: all-plus block has probability p^n
  double p = 0.3;
  auto chain = TransferChain::from_potential(product_potential({1 - p, p}, 1));
  for (int n : {1, 3, 7}) {
    std::vector<std::uint8_t> ones(static_cast<std::size_t>(n), 1);
    CHECK(chain.cylinder_prob(n, 0, ones) == doctest::Approx(std::pow(p, n)).epsilon(1e-12));
  }
  // full-alphabet cylinder (no constraint): total mass 1
  auto m3 = chain.marginal(3);
  CHECK(m3.total() == doctest::Approx(1.0).epsilon(1e-13));

  // 1D Ising h=0: -(1/n) log nu(+_n) approaches log(2 cosh b) - b
  double beta = 0.8;
  auto ising = TransferChain::from_potential(ising_potential(1, beta, 0.0));
  std::vector<std::uint8_t> ones(12, 1);
  double rate12 = -ising.log_block(12, 0, 12, ones.data()) / 12;
  double limit = std::log(2 * std::cosh(beta)) - beta;
  CHECK(std::abs(rate12 - limit) < 0.1);
  // exact form: nu(+_n) = pi(+) P(+,+)^{n-1}
  double ppp = std::exp(beta) / (2 * std::cosh(beta));
  CHECK(ising.cylinder_prob(12, 0, ones) ==
        doctest::Approx(0.5 * std::pow(ppp, 11)).epsilon(1e-11));
}

TEST_CASE("DLR consistency of finite gibbs measures") {
  auto phi = ising_potential(1, 0.7, 0.2);
  Window vol = Window::interval(0, 3);
  auto omega = Configuration::constant(vol.expanded(1), SpinAlphabet::ising(), 0);
  auto mu = finite_gibbs(phi, vol, Boundary::fixed(omega));

  // mu gamma_Lambda = mu for sub-volumes Lambda: resampling the interior of
  // Lambda from the kernel leaves the table invariant
  for (int a = 0; a <= 3; ++a)
    for (int b = a; b <= 3; ++b) {
      Window lam = Window::interval(a, b);
      std::vector<double> out(static_cast<std::size_t>(mu.n_states()), 0.0);
      std::vector<std::uint8_t> v(4);
      for (std::int64_t s = 0; s < mu.n_states(); ++s) {
        decode_state(s, 2, 4, v.data());
        Configuration cfg = omega;
        for (int i = 0; i < 4; ++i) cfg.set_value(site1(i), v[i]);
        KernelTable k = gibbs_kernel(phi, lam, cfg);
        for (std::int64_t ls = 0; ls < static_cast<std::int64_t>(k.probs.size()); ++ls) {
          std::uint8_t lv[4];
          decode_state(ls, 2, lam.site_count(), lv);
          std::vector<std::uint8_t> full(v.begin(), v.end());
          for (std::int64_t i = 0; i < lam.site_count(); ++i)
            full[static_cast<std::size_t>(vol.index_of(lam.site_at(i)))] = lv[i];
          out[static_cast<std::size_t>(encode_state(2, 4, full.data()))] +=
              mu.prob(s) * k.prob(ls);
        }
      }
      for (std::int64_t s = 0; s < mu.n_states(); ++s)
        CHECK(out[static_cast<std::size_t>(s)] == doctest::Approx(mu.prob(s)).epsilon(1e-11));
    }
}

TEST_CASE("gibbs sampler: determinism, uniformity, correlations") {
  auto phi = ising_potential(1, 0.5, 0.0);
  Window vol = Window::interval(0, 5);

  // two runs with the same seed produce identical sample sets
  auto s1 = gibbs_sampler(phi, vol, Boundary::free_bc(), 42, 200, 50);
  auto s2 = gibbs_sampler(phi, vol, Boundary::free_bc(), 42, 200, 50);
  REQUIRE(s1.samples.size() == s2.samples.size());
  CHECK(s1.samples == s2.samples);
  auto s3 = gibbs_sampler(phi, vol, Boundary::free_bc(), 43, 200, 50);
  CHECK(s1.samples != s3.samples);

  // beta = 0: single-site frequency 1/2 within 3 standard errors
  auto u = gibbs_sampler(zero_potential(2, 1), vol, Boundary::free_bc(), 7, 2000, 100);
  double f = 0.0;
  for (const auto& s : u.samples) f += s[2];
  f /= static_cast<double>(u.samples.size());
  double se = 0.5 / std::sqrt(static_cast<double>(u.samples.size()));
  CHECK(std::abs(f - 0.5) <= 3 * se);

  // 1D Ising: <s_0 s_1> within 3 s.e. of the free-chain value tanh(beta)
  auto run = gibbs_sampler(phi, vol, Boundary::free_bc(), 11, 4000, 200, 2);
  double c = 0.0, c2 = 0.0;
  for (const auto& s : run.samples) {
    double v = ising_value(s[0]) * ising_value(s[1]);
    c += v;
    c2 += v * v;
  }
  double n = static_cast<double>(run.samples.size());
  c /= n;
  double sd = std::sqrt((c2 / n - c * c) / n) * 3;  // 3 s.e. (correlated sweeps: generous)
  CHECK(std::abs(c - std::tanh(0.5)) <= std::max(sd * 3, 0.05));
}

TEST_CASE("sampler long-run frequencies match finite_gibbs on a 2x2 window") {
  auto phi = ising_potential(2, 0.4, 0.0);
  Window vol = Window::box2(0, 0, 1, 1);
  auto omega = Configuration::constant(vol.expanded(1), SpinAlphabet::ising(), 1);
  auto mu = finite_gibbs(phi, vol, Boundary::fixed(omega));
  auto run = gibbs_sampler(phi, vol, Boundary::fixed(omega), 1234, 20000, 500);
  std::vector<double> freq(16, 0.0);
  for (const auto& s : run.samples) freq[static_cast<std::size_t>(encode_state(2, 4, s.data()))] += 1.0;
  for (auto& x : freq) x /= static_cast<double>(run.samples.size());
  for (std::int64_t st = 0; st < 16; ++st) {
    double p = mu.prob(st);
    double se = std::sqrt(p * (1 - p) / static_cast<double>(run.samples.size()));
    CHECK(std::abs(freq[static_cast<std::size_t>(st)] - p) <= std::max(5 * se, 0.01));
  }
}

TEST_CASE("decimate") {
  // b = 1 is the identity
  auto mu = ExactMeasure::product(Window::interval(0, 3), {0.4, 0.6});
  auto same = decimate(mu, 1);
  CHECK(same.probs() == mu.probs());

  // product measures stay products with the same marginal
  auto d2 = decimate(ExactMeasure::product(Window::interval(0, 4), {0.4, 0.6}), 2);
  CHECK(d2.window().site_count() == 3);
  for (std::int64_t s = 0; s < d2.n_states(); ++s) {
    std::uint8_t v[3];
    decode_state(s, 2, 3, v);
    double want = 1.0;
    for (int i = 0; i < 3; ++i) want *= v[i] ? 0.6 : 0.4;
    CHECK(d2.prob(s) == doctest::Approx(want).epsilon(1e-12));
  }

  CHECK_THROWS(decimate(ExactMeasure::product(Window::interval(0, 3), {0.5, 0.5}), 2));

  // composition: decimating by 2 then 3 equals decimating by 6
  auto big = TransferChain::from_potential(ising_potential(1, 0.9, 0.0)).marginal(13);
  auto a = decimate(decimate(big, 2), 3);
  auto b = decimate(big, 6);
  for (std::int64_t s = 0; s < a.n_states(); ++s)
    CHECK(a.prob(s) == doctest::Approx(b.prob(s)).epsilon(1e-13));
}

TEST_CASE("decimated 1D Ising is the renormalized chain, tanh b' = tanh^2 b") {
  for (double beta : {0.3, 0.7, 1.1}) {
    auto chain = TransferChain::from_potential(ising_potential(1, beta, 0.0));
    double bp = std::atanh(std::tanh(beta) * std::tanh(beta));
    auto renorm = TransferChain::from_potential(ising_potential(1, bp, 0.0));
    for (int n : {2, 4, 7, 10}) {
      auto table = decimate(chain.marginal(2 * n - 1), 2);
      auto want = renorm.marginal(n);
      for (std::int64_t s = 0; s < want.n_states(); ++s)
        CHECK(table.prob(s) == doctest::Approx(want.prob(s)).epsilon(1e-10));
    }
  }
}

TEST_CASE("stochastic domination") {
  Window w2 = Window::interval(0, 1);
  auto lo = ExactMeasure::product(w2, {0.7, 0.3});
  auto hi = ExactMeasure::product(w2, {0.4, 0.6});

  auto self = stochastic_domination_check(lo, lo);
  CHECK(self.worst_violation <= 1e-14);
  CHECK(self.exhaustive);

  // Bernoulli(0.3) below Bernoulli(0.6): no violation
  auto ok = stochastic_domination_check(lo, hi);
  CHECK(ok.worst_violation <= 1e-14);

  // reversed pair violates
  auto bad = stochastic_domination_check(hi, lo);
  CHECK(bad.worst_violation > 0.2);

  // plus-boundary Ising dominates minus-boundary Ising (FKG sandwich)
  auto phi = ising_potential(1, 0.8, 0.0);
  Window vol = Window::interval(0, 3);
  auto wplus = Configuration::constant(vol.expanded(1), SpinAlphabet::ising(), 1);
  auto wminus = Configuration::constant(vol.expanded(1), SpinAlphabet::ising(), 0);
  auto mup = finite_gibbs(phi, vol, Boundary::fixed(wplus));
  auto mum = finite_gibbs(phi, vol, Boundary::fixed(wminus));
  CHECK(stochastic_domination_check(mum, mup).worst_violation <= 1e-12);
  CHECK(stochastic_domination_check(mup, mum).worst_violation > 1e-3);
}

TEST_CASE("constrained partition sums") {
  auto phi = ising_potential(1, 0.6, 0.0);
  Window vol = Window::interval(0, 3);
  // fixing no site reproduces log_partition
  std::vector<std::uint8_t> mask(4, 0), vals(4, 0);
  CHECK(constrained_log_partition(phi, vol, Boundary::free_bc(), mask, vals) ==
        doctest::Approx(log_partition(phi, vol, Boundary::free_bc())).epsilon(1e-13));
  // fixing every site leaves a single Boltzmann weight
  mask.assign(4, 1);
  vals = {1, 0, 0, 1};
  double mh = -constrained_log_partition(phi, vol, Boundary::free_bc(), mask, vals);
  // free-b.c. energy of (+,-,-,+): bonds +-, --, -+ give b - b + b
  CHECK(mh == doctest::Approx(0.6).epsilon(1e-12));
}

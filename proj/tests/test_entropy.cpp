#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ggibbs/entropy.hpp"
#include "ggibbs/measure.hpp"
#include "ggibbs/potential.hpp"
#include "ggibbs/rng.hpp"
#include "ggibbs/transfer.hpp"

using namespace ggibbs;

namespace {

const std::vector<int> kSchedule = {4, 6, 8, 10, 12};

ChainFamily ising_chain(double beta) {
  return ChainFamily(TransferChain::from_potential(ising_potential(1, beta, 0.0)),
                     "ising-" + std::to_string(beta));
}

}  // namespace

TEST_CASE("relative_entropy_fv") {
  Window w = Window::interval(0, 0);
  auto mu = ExactMeasure::product(w, {0.7, 0.3});
  auto nu = ExactMeasure::product(w, {0.5, 0.5});

  CHECK(relative_entropy_fv(mu, mu).value == 0.0);
  auto h = relative_entropy_fv(mu, nu);
  CHECK_FALSE(h.infinite);
  CHECK(h.value == doctest::Approx(0.08228287850505178).epsilon(1e-12));

  // mu charges a nu-null atom: +infinity flag, not a large float
  auto dirac = ExactMeasure(w, 2, {0.0, 1.0});
  auto nu0 = ExactMeasure(w, 2, {1.0, 0.0});
  auto inf = relative_entropy_fv(dirac, nu0);
  CHECK(inf.infinite);

  // Jensen: nonnegative on random normalized tables
  CounterRng rng(8);
  Window w3 = Window::interval(0, 2);
  for (int it = 0; it < 200; ++it) {
    std::vector<double> a(8), b(8);
    double sa = 0, sb = 0;
    for (int i = 0; i < 8; ++i) {
      a[static_cast<std::size_t>(i)] = rng.uniform01() + 1e-6;
      b[static_cast<std::size_t>(i)] = rng.uniform01() + 1e-6;
      sa += a[static_cast<std::size_t>(i)];
      sb += b[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < 8; ++i) {
      a[static_cast<std::size_t>(i)] /= sa;
      b[static_cast<std::size_t>(i)] /= sb;
    }
    auto hv = relative_entropy_fv(ExactMeasure(w3, 2, a), ExactMeasure(w3, 2, b));
    CHECK(hv.value >= -1e-14);
  }
}

TEST_CASE("monotonicity of h_Lambda under window growth") {
  auto mu = ising_chain(0.4);
  auto nu = ising_chain(0.9);
  double prev = -1.0;
  for (int n : {1, 2, 3, 5, 8}) {
    double h = relative_entropy_fv(mu.marginal(n), nu.marginal(n)).value;
    CHECK(h >= prev - 1e-13);
    prev = h;
  }
}

TEST_CASE("relative_entropy_density closed forms") {
  // identical generators: zero at every n
  auto same = relative_entropy_density(ising_chain(0.5), ising_chain(0.5), kSchedule);
  for (auto& [n, v] : same.points) CHECK(std::abs(v) <= 1e-13);
  CHECK(std::abs(same.density) <= 1e-12);

  // product vs product: p log p/q + (1-p) log (1-p)/(1-q) exactly at every n
  double p = 0.3, q = 0.6;
  double want = p * std::log(p / q) + (1 - p) * std::log((1 - p) / (1 - q));
  auto est = relative_entropy_density(ProductFamily({1 - p, p}), ProductFamily({1 - q, q}),
                                      kSchedule);
  for (auto& [n, v] : est.points) CHECK(v == doctest::Approx(want).epsilon(1e-12));
  CHECK(est.density == doctest::Approx(want).epsilon(1e-10));
  // chain rule: h_Lambda = n * single-site KL for products
  auto fv3 = relative_entropy_fv(ProductFamily({1 - p, p}).marginal(3),
                                 ProductFamily({1 - q, q}).marginal(3));
  CHECK(fv3.value == doctest::Approx(3 * want).epsilon(1e-12));

  // bracket contains the extrapolated density
  CHECK(est.bracket_lo <= est.density + 1e-15);
  CHECK(est.bracket_hi >= est.density - 1e-15);
}

TEST_CASE("ks_entropy closed forms") {
  auto uni = ks_entropy(ProductFamily({0.25, 0.25, 0.25, 0.25}), {3, 4, 5, 6, 7});
  CHECK(uni.density == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  double p = 0.3;
  auto bern = ks_entropy(ProductFamily({1 - p, p}), kSchedule);
  CHECK(bern.density ==
        doctest::Approx(-p * std::log(p) - (1 - p) * std::log(1 - p)).epsilon(1e-11));

  for (double beta : {0.0, 0.3, 0.6, 1.0}) {
    auto est = ks_entropy(ising_chain(beta), kSchedule);
    double want = std::log(2 * std::cosh(beta)) - beta * std::tanh(beta);
    CHECK(est.density == doctest::Approx(want).epsilon(1e-10));
    CHECK(est.method == "Transfer");
  }
}

TEST_CASE("e_plus closed forms") {
  // delta_plus measure: zero rate
  auto dp = e_plus(DeltaFamily(2, 1), kSchedule);
  CHECK(dp.density == doctest::Approx(0.0).epsilon(1e-14));

  double p = 0.35;
  auto bern = e_plus(ProductFamily({1 - p, p}), kSchedule);
  CHECK(bern.density == doctest::Approx(-std::log(p)).epsilon(1e-11));

  for (double beta : {0.0, 0.3, 0.6, 1.0}) {
    auto est = e_plus(ising_chain(beta), kSchedule);
    double want = std::log(2 * std::cosh(beta)) - beta;
    CHECK(std::abs(est.density - want) <= 1e-10);
  }
}

TEST_CASE("e_lambda") {
  double p = 0.4, q = 0.25;
  ProductFamily nu({1 - p, p});
  ProductFamily lam({1 - q, q});

  // lambda = delta_plus reduces to e_plus through the same code path
  auto viaLambda = e_lambda(nu, DeltaFamily(2, 1), kSchedule);
  auto viaPlus = e_plus(nu, kSchedule);
  CHECK(viaLambda.density == viaPlus.density);
  CHECK(viaLambda.points == viaPlus.points);

  // lambda = nu: per-site Shannon entropy
  auto self = e_lambda(nu, nu, kSchedule);
  CHECK(self.density ==
        doctest::Approx(-p * std::log(p) - (1 - p) * std::log(1 - p)).epsilon(1e-11));

  // cross entropy: -q log p - (1-q) log(1-p)
  auto cross = e_lambda(nu, lam, kSchedule);
  CHECK(cross.density ==
        doctest::Approx(-q * std::log(p) - (1 - q) * std::log(1 - p)).epsilon(1e-11));

  // MC tier agrees within a few standard errors
  auto mc = e_lambda(nu, lam, {8, 10, 12}, 4000, 99);
  CHECK(mc.method == "MC");
  CHECK(mc.mc_error > 0.0);
  CHECK(std::abs(mc.density - cross.density) <= 6 * mc.mc_error + 1e-3);

  // lambda charging a nu-null cylinder flags +infinity
  auto bad = e_lambda(ProductFamily({1.0, 0.0}), DeltaFamily(2, 1), {2, 3});
  CHECK(bad.infinite);
}

TEST_CASE("sullivan density formula") {
  // mu = nu = 1D Ising: h(mu|nu) = 0 (first part of the variational principle)
  for (double beta : {0.0, 0.3, 0.6, 1.0}) {
    auto phi = ising_potential(1, beta, 0.0);
    auto mu = ising_chain(beta);
    auto ep = e_plus(mu, kSchedule);
    auto res = sullivan_density(phi, mu, ep, kSchedule);
    CHECK(std::abs(res.value) <= 1e-8);
  }

  // mu = Bernoulli(1/2), nu = Ising(beta): matches the direct density
  for (double beta : {0.3, 0.6}) {
    auto phi = ising_potential(1, beta, 0.0);
    ProductFamily mu({0.5, 0.5});
    auto nu = ising_chain(beta);
    auto ep = e_plus(nu, kSchedule);
    auto sul = sullivan_density(phi, mu, ep, kSchedule);
    auto direct = relative_entropy_density(mu, nu, kSchedule);
    CHECK(std::abs(sul.value - direct.density) <= 1e-6);
    CHECK(sul.value == doctest::Approx(std::log(std::cosh(beta))).epsilon(1e-9));
  }

  // beta = 0: degenerates to log 2 - h(mu), the KL from the uniform measure
  {
    auto phi = ising_potential(1, 0.0, 0.0);
    ProductFamily mu({0.7, 0.3});
    auto nu = ising_chain(0.0);
    auto ep = e_plus(nu, kSchedule);
    auto sul = sullivan_density(phi, mu, ep, kSchedule);
    double hmu = -0.7 * std::log(0.7) - 0.3 * std::log(0.3);
    CHECK(sul.d_term == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(sul.value == doctest::Approx(std::log(2.0) - hmu).epsilon(1e-10));
  }
}

TEST_CASE("pressure_ratio_check") {
  // identical generators: zero at every n
  auto same = pressure_ratio_check(ising_chain(0.7), ising_chain(0.7), kSchedule);
  for (auto& [n, v] : same.points) CHECK(v == 0.0);

  // two Ising chains: limit e+(beta2) - e+(beta1)
  double b1 = 0.3, b2 = 0.8;
  auto est = pressure_ratio_check(ising_chain(b1), ising_chain(b2), kSchedule);
  double want = (std::log(2 * std::cosh(b2)) - b2) - (std::log(2 * std::cosh(b1)) - b1);
  CHECK(est.density == doctest::Approx(want).epsilon(1e-9));

  // plus-b.c. vs minus-b.c. finite chains in the unique-phase regime: limit 0
  auto mk = [](int leftsym) {
    auto tc = TransferChain::from_potential(ising_potential(1, 0.6, 0.0));
    tc.set_edges(TransferChain::Edge::Fixed, TransferChain::Edge::Fixed, leftsym, leftsym);
    return ChainFamily(std::move(tc), leftsym ? "plus-bc" : "minus-bc");
  };
  auto pm = pressure_ratio_check(mk(1), mk(0), {6, 8, 10, 12, 14});
  CHECK(std::abs(pm.density) <= 1e-2);
  // the per-site points shrink as the window grows
  CHECK(std::abs(pm.points.back().second) < std::abs(pm.points.front().second));
}

TEST_CASE("sullivan d-average, MC route agrees with the exact sum") {
  auto phi = ising_potential(1, 0.8, 0.0);
  ProductFamily mu({0.45, 0.55});
  double exact = sullivan_d_average(phi, mu);

  // sample the product measure and average D(sigma^+)
  CounterRng rng(17);
  SampleSet ss;
  ss.window = Window::interval(-2, 2);
  ss.q = 2;
  for (int k = 0; k < 20000; ++k) {
    std::vector<std::uint8_t> v(5);
    for (auto& x : v) x = rng.uniform01() < 0.55 ? 1 : 0;
    ss.samples.push_back(std::move(v));
  }
  auto [mean, se] = sullivan_d_average_mc(phi, ss, SpinAlphabet::ising());
  CHECK(std::abs(mean - exact) <= 4 * se + 1e-12);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ggibbs/lattice.hpp"
#include "ggibbs/potential.hpp"
#include "ggibbs/rng.hpp"

using namespace ggibbs;

namespace {

Configuration binary_config(const Window& w, std::int64_t state, int ext = 1) {
  std::vector<std::uint8_t> vals(static_cast<std::size_t>(w.site_count()));
  decode_state(state, 2, w.site_count(), vals.data());
  return Configuration(w, SpinAlphabet::ising(), std::move(vals),
                       Exterior::constant_rule(ext));
}

// exact sup over (omega, eta) of |H^eta(sigma) - H^omega(sigma)| for nearest
// neighbour potentials; every crossing term touches exactly one exterior site
// so the sup factorizes per annulus site
double boundary_energy_gap(const Potential& phi, const Window& volume,
                           const Configuration& sigma) {
  auto insts = phi.instances_meeting(volume);
  Window annulus = volume.expanded(phi.range());
  double gap = 0.0;
  for (const Site& x : annulus.sites_outside(volume)) {
    double lo = 0.0, hi = 0.0;
    bool seen = false;
    for (int v = 0; v < phi.q(); ++v) {
      double e = 0.0;
      bool any = false;
      for (const auto& inst : insts) {
        if (inst.inside) continue;
        int ext_sites = 0;
        bool touches = false;
        for (const Site& s : inst.abs_sites)
          if (!volume.contains(s)) {
            ++ext_sites;
            if (s == x) touches = true;
          }
        if (!touches) continue;
        REQUIRE(ext_sites == 1);  // oracle precondition
        std::int64_t idx = 0, stride = 1;
        for (const Site& s : inst.abs_sites) {
          idx += stride * (volume.contains(s) ? sigma.value_at(s) : v);
          stride *= phi.q();
        }
        e += inst.term->table[static_cast<std::size_t>(idx)];
        any = true;
      }
      if (!any) continue;
      if (!seen) {
        lo = hi = e;
        seen = true;
      } else {
        lo = std::min(lo, e);
        hi = std::max(hi, e);
      }
    }
    if (seen) gap += hi - lo;
  }
  return gap;
}

}  // namespace

TEST_CASE("hamiltonian: zero potential and 1D Ising bond count") {
  auto zero = zero_potential(2, 1);
  Window vol = Window::interval(0, 1);
  Window amb = Window::interval(-1, 2);
  auto omega = Configuration::constant(amb, SpinAlphabet::ising(), 1);
  auto pp = Configuration::constant(amb, SpinAlphabet::ising(), 1);
  CHECK(hamiltonian(zero, vol, pp, omega) == 0.0);

  auto phi = ising_potential(1, 1.0, 0.0);
  // sigma = (+,+) with all-plus omega: bonds {-1,0},{0,1},{1,2} give -3
  CHECK(hamiltonian(phi, vol, pp, omega) == doctest::Approx(-3.0).epsilon(1e-14));
  // sigma = (+,-): -1 + 1 + 1 = +1
  auto pm = pp;
  pm.set_value(site1(1), 0);
  CHECK(hamiltonian(phi, vol, pm, omega) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hamiltonian is linear in the potential") {
  auto phi = ising_potential(1, 0.7, 0.0);
  auto psi = ising_potential(1, 0.0, 0.4);
  Potential sum(2, 1);
  for (const auto& t : phi.ti_terms()) sum.add_ti_term(t.shape.sites, t.table);
  for (const auto& t : psi.ti_terms()) sum.add_ti_term(t.shape.sites, t.table);

  Window vol = Window::interval(-1, 1);
  Window amb = Window::interval(-2, 2);
  CounterRng rng(42);
  for (int it = 0; it < 50; ++it) {
    auto sigma = binary_config(amb, rng.uniform_int(32));
    auto omega = binary_config(amb, rng.uniform_int(32), rng.uniform_int(2));
    double a = hamiltonian(phi, vol, sigma, omega);
    double b = hamiltonian(psi, vol, sigma, omega);
    double c = hamiltonian(sum, vol, sigma, omega);
    CHECK(c == doctest::Approx(a + b).epsilon(1e-13));
  }
}

TEST_CASE("uac_norm") {
  CHECK(uac_norm(zero_potential(2, 1)).per_site_norm == 0.0);
  CHECK(uac_norm(ising_potential(1, 1.0, 0.0)).per_site_norm == doctest::Approx(2.0));
  CHECK(uac_norm(ising_potential(1, 1.0, 0.5)).per_site_norm == doctest::Approx(2.5));
  CHECK(uac_norm(ising_potential(2, 0.3, 0.1)).per_site_norm == doctest::Approx(4 * 0.3 + 0.1));
}

TEST_CASE("truncate") {
  auto phi = ising_potential(1, 0.8, 0.25);
  auto same = truncate(phi, 5);
  CHECK(same.ti_terms().size() == phi.ti_terms().size());
  CHECK(same.range() == phi.range());

  auto fields = truncate(phi, 0);
  CHECK(fields.range() == 0);
  REQUIRE(fields.ti_terms().size() == 1);
  CHECK(fields.ti_terms()[0].shape.size() == 1);
  CHECK(fields.ti_terms()[0].table[0] == doctest::Approx(0.25));  // -h * (-1)

  // |log Z(phi) - log Z(phi^(R))| <= |Lambda| * sup_sigma |sum_{A ni 0, diam > R} Phi_A|
  Window vol = Window::interval(0, 5);
  double full = log_partition(phi, vol, Boundary::free_bc());
  double trunc = log_partition(fields, vol, Boundary::free_bc());
  CHECK(std::abs(full - trunc) <= vol.site_count() * 2 * 0.8 + 1e-12);
  // R >= r: exact equality
  CHECK(log_partition(same, vol, Boundary::free_bc()) == doctest::Approx(full).epsilon(1e-15));
}

TEST_CASE("log_partition closed forms") {
  // zero potential: n log q
  auto z3 = zero_potential(3, 1);
  Window vol = Window::interval(0, 4);
  CHECK(log_partition(z3, vol, Boundary::free_bc()) ==
        doctest::Approx(5 * std::log(3.0)).epsilon(1e-14));

  // 1D Ising free boundary: log 2 + (n-1) log(2 cosh beta)
  for (double beta : {0.0, 0.4, 1.1}) {
    auto phi = ising_potential(1, beta, 0.0);
    for (int n : {1, 2, 5, 8}) {
      double got = log_partition(phi, Window::interval(0, n - 1), Boundary::free_bc());
      double want = std::log(2.0) + (n - 1) * std::log(2.0 * std::cosh(beta));
      CHECK(got == doctest::Approx(want).epsilon(1e-13));
    }
  }

  // per-site free-b.c. rate drifts to log(2 cosh beta); log 2 exactly at beta=0
  double beta = 0.6;
  auto phi = ising_potential(1, beta, 0.0);
  int n = 20;
  double rate = log_partition(phi, Window::interval(0, n - 1), Boundary::free_bc()) / n;
  CHECK(rate == doctest::Approx(std::log(2 * std::cosh(beta))).epsilon(5e-2));
  CHECK(log_partition(ising_potential(1, 0.0, 0.0), Window::interval(0, 0),
                      Boundary::free_bc()) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("periodic boundary counts each bond once") {
  auto phi = ising_potential(1, 0.5, 0.0);
  // ring of n sites: Z = (2 cosh b)^n + (2 sinh b)^n
  for (int n : {3, 4, 6}) {
    double got = log_partition(phi, Window::interval(0, n - 1), Boundary::periodic());
    double want = std::log(std::pow(2 * std::cosh(0.5), n) + std::pow(2 * std::sinh(0.5), n));
    CHECK(got == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("boundary condition independence at the bulk scale") {
  // sup_{omega,eta,sigma} |H^eta(sigma) - H^omega(sigma)| <= C1 |dLambda|,
  // and the same bound for |log Z(omega) - log Z(eta)|
  for (double h : {0.0, 0.5}) {
    auto phi1 = ising_potential(1, 0.8, h);
    double c1 = uac_norm(phi1).per_site_norm;
    for (int n = 1; n <= 8; ++n) {
      Window vol = Window::interval(0, n - 1);
      Window amb = vol.expanded(1);
      double bound = c1 * 2;  // |dLambda| = 2 in 1D at range 1
      double worst = 0.0;
      for (std::int64_t s = 0; s < (std::int64_t{1} << n); ++s) {
        auto sigma = Configuration::constant(amb, SpinAlphabet::ising(), 1);
        std::uint8_t v[16];
        decode_state(s, 2, n, v);
        for (int i = 0; i < n; ++i) sigma.set_value(site1(i), v[i]);
        worst = std::max(worst, boundary_energy_gap(phi1, vol, sigma));
      }
      CHECK(worst <= bound + 1e-12);

      // log-partition consequence, exhaustive over annulus boundary pairs
      double zworst = 0.0;
      for (int b1 = 0; b1 < 4; ++b1)
        for (int b2 = 0; b2 < 4; ++b2) {
          auto w1 = Configuration::constant(amb, SpinAlphabet::ising(), 1);
          w1.set_value(site1(-1), b1 & 1);
          w1.set_value(site1(n), (b1 >> 1) & 1);
          auto w2 = Configuration::constant(amb, SpinAlphabet::ising(), 1);
          w2.set_value(site1(-1), b2 & 1);
          w2.set_value(site1(n), (b2 >> 1) & 1);
          double z1 = log_partition(phi1, vol, Boundary::fixed(w1));
          double z2 = log_partition(phi1, vol, Boundary::fixed(w2));
          zworst = std::max(zworst, std::abs(z1 - z2));
        }
      CHECK(zworst <= bound + 1e-12);
    }
  }

  // 2D windows up to 3x3
  auto phi2 = ising_potential(2, 0.45, 0.2);
  double c1 = uac_norm(phi2).per_site_norm;
  for (int a = 1; a <= 3; ++a)
    for (int b = a; b <= 3; ++b) {
      Window vol = Window::box2(0, 0, a - 1, b - 1);
      Window amb = vol.expanded(1);
      double nboundary = static_cast<double>(amb.site_count() - vol.site_count());
      double bound = c1 * nboundary;
      double worst = 0.0;
      for (std::int64_t s = 0; s < state_count(2, vol.site_count()); ++s) {
        auto sigma = Configuration::constant(amb, SpinAlphabet::ising(), 1);
        std::uint8_t v[16];
        decode_state(s, 2, vol.site_count(), v);
        for (std::int64_t i = 0; i < vol.site_count(); ++i)
          sigma.set_value(vol.site_at(i), v[i]);
        worst = std::max(worst, boundary_energy_gap(phi2, vol, sigma));
      }
      CHECK(worst <= bound + 1e-12);

      CounterRng rng(5);
      double zworst = 0.0;
      for (int rep = 0; rep < 12; ++rep) {
        auto mk = [&](int which) {
          auto w = Configuration::constant(amb, SpinAlphabet::ising(), 1);
          for (const Site& x : amb.sites_outside(vol))
            w.set_value(x, which == 0 ? 0 : which == 1 ? 1 : rng.uniform_int(2));
          return w;
        };
        double z1 = log_partition(phi2, vol, Boundary::fixed(mk(rep % 3)));
        double z2 = log_partition(phi2, vol, Boundary::fixed(mk((rep + 1) % 3)));
        zworst = std::max(zworst, std::abs(z1 - z2));
      }
      CHECK(zworst <= bound + 1e-12);
    }
}

TEST_CASE("term tables survive unsorted site lists") {
  // same interaction entered with sites in two orders must agree everywhere
  Potential a(2, 1), b(2, 1);
  std::vector<double> tab = {0.1, -0.7, 0.3, 0.9};  // index = s(origin) + 2 s(e1)
  a.add_ti_term({origin(), site1(1)}, tab);
  std::vector<double> swapped = {0.1, 0.3, -0.7, 0.9};
  b.add_ti_term({site1(1), origin()}, swapped);
  Window vol = Window::interval(0, 3);
  Window amb = vol.expanded(1);
  for (std::int64_t s = 0; s < 64; ++s) {
    auto sigma = binary_config(amb, s);
    auto omega = Configuration::constant(amb, SpinAlphabet::ising(), 0);
    CHECK(hamiltonian(a, vol, sigma, omega) ==
          doctest::Approx(hamiltonian(b, vol, sigma, omega)).epsilon(1e-15));
  }
}

TEST_CASE("terms depend only on their shape coordinates") {
  auto phi = ising_potential(2, 0.9, 0.3);
  Window vol = Window::box2(0, 0, 1, 1);
  Window amb = vol.expanded(1);
  CounterRng rng(11);
  for (const auto& t : phi.ti_terms()) {
    (void)t;
  }
  // perturbing sigma outside the r-annulus of the volume leaves H unchanged
  for (int it = 0; it < 30; ++it) {
    Window big = vol.expanded(3);
    std::vector<std::uint8_t> vals(static_cast<std::size_t>(big.site_count()));
    for (auto& v : vals) v = static_cast<std::uint8_t>(rng.uniform_int(2));
    Configuration sigma(big, SpinAlphabet::ising(), vals, Exterior::constant_rule(1));
    Configuration omega = sigma;
    double h0 = hamiltonian(phi, vol, sigma, omega);
    // flip a site at Chebyshev distance 3 in both roles' "interior" copy: it
    // lies outside volume so only omega matters, and it is beyond the range
    Site far = site2(vol.hi()[0] + 3, vol.hi()[1] + 3);
    Configuration omega2 = omega;
    omega2.set_value(far, 1 - omega2.value_at(far));
    Configuration sigma2 = sigma;
    sigma2.set_value(far, 1 - sigma2.value_at(far));
    CHECK(hamiltonian(phi, vol, sigma2, omega2) == doctest::Approx(h0).epsilon(1e-15));
  }
  (void)amb;
}

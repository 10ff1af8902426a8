// Timing comparison of the serial reference kernels against the OpenMP
// sharded ones, plus agreement checks. Sizes are desk scale; pass a scale
// factor to grow them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "ggibbs/disorder.hpp"
#include "ggibbs/measure.hpp"
#include "ggibbs/parallel.hpp"
#include "ggibbs/potential.hpp"

using namespace ggibbs;

namespace {

double time_s(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, double serial, double parallel, double diff) {
  std::printf("%-34s %10.3fs %10.3fs %7.2fx   |delta| = %.3g\n", name, serial, parallel,
              serial / parallel, diff);
}

}  // namespace

int main(int argc, char** argv) {
  const int scale = argc > 1 ? std::atoi(argv[1]) : 1;
  std::printf("threads available: %d\n", par::threads());
  std::printf("%-34s %11s %11s %9s\n", "kernel", "serial", "openmp", "speedup");

  // 2D Ising partition function, 4x5 window (2^20 states)
  {
    auto phi = ising_potential(2, 0.44, 0.1);
    Window vol = Window::box2(0, 0, 3 + scale / 2, 4);
    auto omega = Configuration::constant(vol.expanded(1), SpinAlphabet::ising(), 1);
    double zs = 0, zp = 0;
    par::set_parallel(false);
    double ts = time_s([&] { zs = log_partition(phi, vol, Boundary::fixed(omega)); });
    par::set_parallel(true);
    double tp = time_s([&] { zp = log_partition(phi, vol, Boundary::fixed(omega)); });
    row("log_partition 2D (2^20 states)", ts, tp, std::abs(zs - zp));
  }

  // exact Boltzmann table on an 18-site chain
  {
    auto phi = ising_potential(1, 0.8, 0.2);
    Window vol = Window::interval(0, 17);
    double ss = 0, sp = 0;
    par::set_parallel(false);
    double ts = time_s([&] {
      auto mu = finite_gibbs(phi, vol, Boundary::free_bc());
      ss = mu.prob(0);
    });
    par::set_parallel(true);
    double tp = time_s([&] {
      auto mu = finite_gibbs(phi, vol, Boundary::free_bc());
      sp = mu.prob(0);
    });
    row("finite_gibbs 1D (2^18 states)", ts, tp, std::abs(ss - sp));
  }

  // disorder replicas: quenched correlation decay, exact per replica
  {
    JointModel m = rfim_model(1, 0.6, 0.3);
    std::vector<CorrRow> a, b;
    par::set_parallel(false);
    double ts = time_s([&] {
      a = quenched_correlation_decay(m, {1, 2, 4}, Window::interval(0, 13),
                                     Boundary::free_bc(), 16 * scale, 99, 1);
    });
    par::set_parallel(true);
    double tp = time_s([&] {
      b = quenched_correlation_decay(m, {1, 2, 4}, Window::interval(0, 13),
                                     Boundary::free_bc(), 16 * scale, 99, 1);
    });
    double diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i].mean - b[i].mean));
    row("corr-decay replicas (n=14)", ts, tp, diff);
  }

  // joint table for the RFIM on a 9-site chain (4^9 states)
  {
    JointModel m = rfim_model(1, 0.6, 0.4);
    double hs = 0, hp = 0;
    par::set_parallel(false);
    double ts = time_s([&] {
      auto k = joint_measure_exact(m, Window::interval(0, 8), 1, 1);
      hs = k.prob(0);
    });
    par::set_parallel(true);
    double tp = time_s([&] {
      auto k = joint_measure_exact(m, Window::interval(0, 8), 1, 1);
      hp = k.prob(0);
    });
    row("joint_measure_exact (4^9 states)", ts, tp, std::abs(hs - hp));
  }

  return 0;
}

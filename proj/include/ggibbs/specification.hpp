#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ggibbs/lattice.hpp"
#include "ggibbs/measure.hpp"
#include "ggibbs/potential.hpp"

namespace ggibbs {

// gamma_Lambda(. | omega) as an explicit table over the volume states.
struct KernelTable {
  Window volume;
  Configuration boundary;
  std::vector<double> probs;
  std::vector<double> log_probs;

  double prob(std::int64_t state) const { return probs[static_cast<std::size_t>(state)]; }
  double log_prob(std::int64_t state) const { return log_probs[static_cast<std::size_t>(state)]; }
  double prob_of(const Configuration& sigma) const;  // reads sigma on the volume
  std::int64_t state_of(const Configuration& sigma) const;
  // sums to 1 within tol and strictly positive (non-null)
  void validate(double tol = 1e-12) const;
};

// gamma^Phi_Lambda(sigma|omega) = exp(-H(sigma|omega)) / Z(omega), log-domain
KernelTable gibbs_kernel(const Potential& phi, const Window& volume,
                         const Configuration& omega);

// local function: real table over the assignments of its support sites
struct LocalFunction {
  std::vector<Site> support;
  std::vector<double> table;  // little-endian in support order
  int q = 2;
  std::string id;

  double eval(const Configuration& c) const;
  static LocalFunction spin_at(const Site& x, int q);  // +-1 value of a binary site
  static LocalFunction indicator(const std::vector<Site>& sites,
                                 const std::vector<std::uint8_t>& values, int q);
};

struct CylinderEvent {
  std::vector<Site> sites;
  std::vector<std::uint8_t> values;
  bool matches(const Configuration& c) const;
};

// A kernel viewed as a measure on the full ambient window (exterior sites
// pass through from the boundary for proper kernels).
using FullKernel =
    std::function<ExactMeasure(const Window& volume, const Configuration& omega)>;

FullKernel gibbs_full_kernel(const Potential& phi);

// max over (event, boundary) of |gamma_Lambda(B|omega) - 1_B(omega)| for
// events B measurable outside the volume; throws if an event touches it.
double check_proper(const FullKernel& kernel, const Window& volume,
                    const std::vector<Configuration>& boundaries,
                    const std::vector<CylinderEvent>& events);

// max over sigma_{Lambda'} of |(gamma_{Lambda'} gamma_Lambda)(sigma) -
// gamma_{Lambda'}(sigma)| by exact kernel composition.
double check_consistent(const Potential& phi, const Window& inner, const Window& outer,
                        const Configuration& omega);

// E^+_Lambda(sigma|omega) = log gamma(sigma|omega)/gamma(+|omega); for Gibbs
// kernels this is H(+|omega) - H(sigma|omega), no partition function needed.
double relative_energy(const Potential& phi, const Window& volume, const Configuration& sigma,
                       const Configuration& omega);
double relative_energy(const KernelTable& kernel, const Configuration& sigma);

// D(sigma) = E^+_{{0}}(sigma|sigma) = log gamma_0(sigma|sigma)/gamma_0(+|sigma)
double d_function(const Potential& phi, const Configuration& sigma);

// |E^+_Lambda(sigma|omega) - sum_x E^+_x(sigma | T_Lambda^omega[x,sigma,+])|
double telescoping_identity_check(const Potential& phi, const Window& volume,
                                  const Configuration& sigma, const Configuration& omega);

struct OscillationReport {
  std::string function_id;
  Window volume;
  Configuration center;
  int annulus = 0;
  double lo = 0.0;
  double hi = 0.0;
  double mc_error = 0.0;
  std::int64_t evaluations = 0;
  double gap() const { return hi - lo; }
};

// sup/inf of a boundary functional over all assignments of `vary_sites`
// applied on top of `center`; exact enumeration.
OscillationReport oscillate(const std::function<double(const Configuration&)>& fn,
                            const Configuration& center, const std::vector<Site>& vary_sites,
                            const std::string& id);

// sites of the dependence region of gamma_Lambda f outside the annulus
// window Lambda_n = [-n,n]^d (these are the ones the sup/inf runs over)
std::vector<Site> oscillation_vary_sites(const Window& volume, const LocalFunction& f, int range,
                                         int n);

// g_n^+ - g_n^- for gamma_Lambda f of a finite-range Gibbs kernel; exact.
OscillationReport oscillation_gibbs(const Potential& phi, const LocalFunction& f,
                                    const Window& volume, const Configuration& center, int n);

}  // namespace ggibbs

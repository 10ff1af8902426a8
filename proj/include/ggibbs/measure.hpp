#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ggibbs/lattice.hpp"
#include "ggibbs/potential.hpp"

namespace ggibbs {

// Full probability table over the configurations of a window. State indexing
// is little-endian in row-major site order.
class ExactMeasure {
 public:
  ExactMeasure() = default;
  ExactMeasure(Window win, int q, std::vector<double> probs);

  const Window& window() const { return win_; }
  int q() const { return q_; }
  std::int64_t n_states() const { return static_cast<std::int64_t>(probs_.size()); }
  const std::vector<double>& probs() const { return probs_; }
  double prob(std::int64_t state) const { return probs_[static_cast<std::size_t>(state)]; }
  double prob_of(const Configuration& block) const;  // block window == this window
  double log_prob(std::int64_t state) const;

  // normalized within tol, non-negative
  void validate(double tol = 1e-12) const;
  double total() const;

  ExactMeasure marginal(const Window& sub) const;
  // marginal over an arbitrary site list; index little-endian in list order
  std::vector<double> marginal_sites(const std::vector<Site>& sites) const;
  double expectation(const std::function<double(const std::uint8_t*)>& f) const;

  static ExactMeasure uniform(const Window& win, int q);
  static ExactMeasure product(const Window& win, const std::vector<double>& weights);

 private:
  Window win_;
  int q_ = 2;
  std::vector<double> probs_;
};

// Seeded Monte Carlo output. Samples are interior assignments in window site
// order; replicas are concatenated in replica order.
struct SampleSet {
  Window window;
  int q = 2;
  std::vector<std::vector<std::uint8_t>> samples;
  std::string sampler_id;
  std::uint64_t seed = 0;
  int sweeps = 0;
  int burn_in = 0;
};

// Boltzmann table for a potential on a window; shares the kernel code path.
ExactMeasure finite_gibbs(const Potential& phi, const Window& volume, const Boundary& bc);

// Single-site heat bath in raster (row-major) order. The conditional at each
// site is exactly the single-site Gibbs kernel.
SampleSet gibbs_sampler(const Potential& phi, const Window& volume, const Boundary& bc,
                        std::uint64_t seed, int sweeps, int burn_in, int replicas = 1);

// Restriction to the sublattice b Z^d, reindexed to a dense window.
ExactMeasure decimate(const ExactMeasure& mu, int b);
SampleSet decimate(const SampleSet& mu, int b);

struct DominationResult {
  double worst_violation = 0.0;  // max over tested monotone f of mu(f) - nu(f)
  std::int64_t functions_tested = 0;
  bool exhaustive = false;
};

// mu <= nu in the FKG order iff mu(f) <= nu(f) for all monotone increasing f.
// Binary windows with <= 4 sites test every monotone indicator; larger
// windows fall back to the documented family of up-set indicators.
DominationResult stochastic_domination_check(const ExactMeasure& mu, const ExactMeasure& nu);

// log of the constrained partition sum: sites with fixed_mask keep
// fixed_vals, the rest are summed over.
double constrained_log_partition(const Potential& phi, const Window& volume, const Boundary& bc,
                                 const std::vector<std::uint8_t>& fixed_mask,
                                 const std::vector<std::uint8_t>& fixed_vals);

}  // namespace ggibbs

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ggibbs/lattice.hpp"
#include "ggibbs/entropy.hpp"
#include "ggibbs/measure.hpp"
#include "ggibbs/potential.hpp"
#include "ggibbs/specification.hpp"
#include "ggibbs/transfer.hpp"

namespace ggibbs {

// i.i.d. single-site disorder law
struct DisorderLaw {
  enum class Kind { BernoulliOccupancy, SymmetricField };
  Kind kind = Kind::SymmetricField;
  SpinAlphabet alphabet;        // E'
  std::vector<double> values;   // numeric value per symbol (field strength)
  std::vector<double> weights;  // normalized, strictly positive

  static DisorderLaw bernoulli_occupancy(double p);
  // symmetric support/weights, e.g. {-1,+1} with weights {1/2,1/2}
  static DisorderLaw symmetric_field(std::vector<double> values, std::vector<double> weights);
  void validate() const;
  double log_weight(int symbol) const;
  int q() const { return alphabet.size(); }
  int sample_symbol(class CounterRng& rng) const;
};

struct DisorderField {
  Configuration values;  // over the law's alphabet
  DisorderLaw law;
  std::uint64_t seed = 0;
};

DisorderField sample_disorder(const DisorderLaw& law, const Window& window, std::uint64_t seed,
                              int exterior_symbol);

// spins sigma and frozen fields eta on a common window
struct JointConfig {
  Configuration sigma;
  DisorderField eta;
};

// Joint model: potential over the product alphabet E x E'; joint symbol
// j = s + |E| * e (spin index minor).
struct JointModel {
  SpinAlphabet spin;
  DisorderLaw disorder;
  Potential joint{2, 1};  // q = |E| * |E'|

  int q_spin() const { return spin.size(); }
  int q_dis() const { return disorder.q(); }
  int q_joint() const { return q_spin() * q_dis(); }
  int joint_sym(int s, int e) const { return s + q_spin() * e; }
  int spin_of(int j) const { return j % q_spin(); }
  int dis_of(int j) const { return j / q_spin(); }
  SpinAlphabet joint_alphabet() const;
};

// random field Ising model: Phi_{xy} = -beta s s', Phi_x = -h eta_x s
JointModel rfim_model(int dim, double beta, double h);

// freeze eta: spin potential with anchored terms covering `region`
Potential quench(const JointModel& model, const Configuration& eta, const Window& region);

// quenched finite-volume kernel mu_Lambda^{sigma_bc}[eta]
KernelTable quenched_kernel(const JointModel& model, const Configuration& eta,
                            const Window& volume, const Configuration& sigma_boundary);

// exact joint table P(eta_Lambda) mu_Lambda[eta](sigma_Lambda) over the
// product alphabet; eta outside the window is frozen to eta_exterior_symbol
ExactMeasure joint_measure_exact(const JointModel& model, const Window& window,
                                 int sigma_bc_symbol, int eta_exterior_symbol);

// MC tier: sample eta then sigma (heat bath), reproducible in the seed
struct JointSampleSet {
  SampleSet spins;
  std::vector<std::vector<std::uint8_t>> etas;
  std::uint64_t seed = 0;
};
JointSampleSet joint_measure_mc(const JointModel& model, const Window& window,
                                int sigma_bc_symbol, int eta_exterior_symbol,
                                std::uint64_t seed, int sweeps, int burn_in, int replicas);

// the explicit joint conditional kernel on `volume` given xi off the volume;
// the quenched measures inside Q are realized on volume expanded by `margin`
// with a fixed sigma_bc_symbol spin boundary
KernelTable joint_conditional_kernel(const JointModel& model, const Window& volume,
                                     const Configuration& xi_boundary, int margin,
                                     int sigma_bc_symbol);

struct JointBoundRow {
  std::int64_t volume = 0;
  std::int64_t boundary = 0;
  double h_fv = 0.0;
  double sup_log_ratio = 0.0;
  double bound_entropy = 0.0;    // 4 C1 |dLambda|
  double bound_log_ratio = 0.0;  // 8 C1 |dLambda|
};

// h_Lambda(K+|K-) and sup |log K+/K-| against the boundary-order bounds
std::vector<JointBoundRow> joint_entropy_bound_check(const JointModel& model,
                                                     const std::vector<Window>& windows,
                                                     int eta_exterior_symbol);

struct AdRow {
  std::string family;
  int block_len = 0;
  int gap = 0;
  double min_log_ratio = 0.0;
  double max_log_ratio = 0.0;
  double c_n = 0.0;       // decoupling constant of the base measure
  double envelope = 0.0;  // c_n + C |dLambda_n|
  std::int64_t pairs = 0;
  std::int64_t skipped = 0;
};

// documented cylinder family: constant blocks, alternating blocks and one
// seeded random block per length
std::vector<std::vector<std::uint8_t>> ad_cylinder_family(int q, int len, std::uint64_t seed);

AdRow ad_check_product(const std::vector<double>& weights, int block_len, int gap,
                       std::uint64_t seed);
AdRow ad_check_chain(const TransferChain& chain, int block_len, int gap, std::uint64_t seed);
// exact joint table on an ambient 1D window of `total` sites
AdRow ad_check_joint(const JointModel& model, int total, int block_len, int gap,
                     int sigma_bc_symbol, int eta_exterior_symbol, std::uint64_t seed);

struct CorrRow {
  int m = 0;
  double mean = 0.0;
  double se = 0.0;
  int replicas = 0;
};

// c(m): disorder average of |<s_x s_y> - <s_x><s_y>| at distance m along e1,
// quenched measures realized exactly on `window` with the given boundary.
// per_replica, when given, receives one row of |cov| values per replica in
// replica order.
std::vector<CorrRow> quenched_correlation_decay(const JointModel& model,
                                                const std::vector<int>& ms, const Window& window,
                                                const Boundary& bc, int replicas,
                                                std::uint64_t seed, int eta_exterior_symbol,
                                                std::vector<std::vector<double>>* per_replica = nullptr);

// GriSing field ------------------------------------------------------------

struct GrisingSample {
  JointConfig joint;  // spins over {-,+} (meaningful on occupied sites) and
                      // the occupancy field over {0,1}
  Configuration xi;   // {-,0,+}, xi = sigma * eta
  double boundary_touch_fraction = 0.0;  // truncation-bias diagnostic
  std::uint64_t seed = 0;
};

GrisingSample grising_sample(double p, double beta, const Window& window, std::uint64_t seed);

// exact log K(xi_Lambda) under the truncated-cluster convention (clusters cut
// at the window boundary carry free-boundary Ising weights)
double grising_log_cylinder(double p, double beta, const Configuration& xi_block);

// per-site rate of the all-zero block; equals log(1-p) identically
double grising_zero_block_rate(double p, const Window& window);

struct IncompatibilityReport {
  double k_plus_direct = 0.0;  // K+(B)
  double k_mixed = 0.0;        // int K+(d xi) K-_x(B | xi)
  double gap = 0.0;
  int margin = 0;
};

// Evaluates both sides on B = {eta_x = +, sum of the spins adjacent to x = 0}
// at the exact tier on `ambient` with x at the window centre.
IncompatibilityReport rfim_incompatibility(const JointModel& model, const Window& ambient,
                                           int margin, int eta_exterior_symbol);

}  // namespace ggibbs

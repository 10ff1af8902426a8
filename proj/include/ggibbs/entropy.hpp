#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ggibbs/measure.hpp"
#include "ggibbs/potential.hpp"
#include "ggibbs/rng.hpp"
#include "ggibbs/transfer.hpp"

namespace ggibbs {

// real value with +infinity as a first-class flag (never a large float)
struct Ent {
  double value = 0.0;
  bool infinite = false;

  static Ent inf() { return Ent{0.0, true}; }
  static Ent of(double v) { return Ent{v, false}; }
};

struct EntropyEstimate {
  std::string method;  // Exact | Transfer | MC
  std::vector<std::pair<int, double>> points;  // (side length L, per-site value)
  double density = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool infinite = false;
  double mc_error = 0.0;
};

// A measure presented through its finite-window marginals along a schedule.
// 1D families use windows [0, n-1]; d-dimensional ones use boxes [0, n-1]^d.
class MeasureFamily {
 public:
  virtual ~MeasureFamily() = default;
  virtual std::string id() const = 0;
  virtual int dim() const { return 1; }
  virtual Window window(int n) const;
  virtual ExactMeasure marginal(int n) const = 0;
  // log probability of a block configuration on window(n); the default goes
  // through the marginal table
  virtual double log_prob_block(const Configuration& block) const;
  // marginal over an arbitrary site list, little-endian in list order
  virtual std::vector<double> marginal_sites(const std::vector<Site>& sites) const = 0;
  virtual std::string method_tag() const { return "Exact"; }
  virtual int q() const = 0;
  virtual SpinAlphabet alphabet() const;

  virtual bool sampleable() const { return false; }
  virtual std::vector<std::uint8_t> sample_block(int n, CounterRng& rng) const;
};

class ProductFamily : public MeasureFamily {
 public:
  ProductFamily(std::vector<double> weights, int dim = 1);
  std::string id() const override { return "product"; }
  int dim() const override { return dim_; }
  ExactMeasure marginal(int n) const override;
  double log_prob_block(const Configuration& block) const override;
  std::vector<double> marginal_sites(const std::vector<Site>& sites) const override;
  int q() const override { return static_cast<int>(weights_.size()); }
  bool sampleable() const override { return true; }
  std::vector<std::uint8_t> sample_block(int n, CounterRng& rng) const override;
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> weights_;  // normalized
  int dim_;
};

class ChainFamily : public MeasureFamily {
 public:
  explicit ChainFamily(TransferChain chain, std::string tag = "chain");
  std::string id() const override { return tag_; }
  ExactMeasure marginal(int n) const override { return chain_.marginal(n); }
  double log_prob_block(const Configuration& block) const override;
  std::vector<double> marginal_sites(const std::vector<Site>& sites) const override;
  int q() const override { return chain_.q(); }
  std::string method_tag() const override { return "Transfer"; }
  const TransferChain& chain() const { return chain_; }

 private:
  TransferChain chain_;
  std::string tag_;
};

// finite-volume Gibbs tables with a declared boundary per window
class GibbsFamily : public MeasureFamily {
 public:
  enum class Bc { Plus, Minus, Free };
  GibbsFamily(Potential phi, Bc bc, SpinAlphabet alphabet);
  std::string id() const override { return "gibbs"; }
  int dim() const override { return phi_.dim(); }
  ExactMeasure marginal(int n) const override;
  std::vector<double> marginal_sites(const std::vector<Site>& sites) const override;
  int q() const override { return phi_.q(); }
  SpinAlphabet alphabet() const override { return alphabet_; }
  ExactMeasure measure_on(const Window& w) const;

 private:
  Potential phi_;
  Bc bc_;
  SpinAlphabet alphabet_;
};

// point mass at the constant-`symbol` configuration
class DeltaFamily : public MeasureFamily {
 public:
  DeltaFamily(int q, int symbol, int dim = 1);
  std::string id() const override { return "delta"; }
  int dim() const override { return dim_; }
  ExactMeasure marginal(int n) const override;
  double log_prob_block(const Configuration& block) const override;
  std::vector<double> marginal_sites(const std::vector<Site>& sites) const override;
  int q() const override { return q_; }
  bool sampleable() const override { return true; }
  std::vector<std::uint8_t> sample_block(int n, CounterRng& rng) const override;

 private:
  int q_, symbol_, dim_;
};

// finite-volume relative entropy sum mu log(mu/nu); +infinity when mu
// charges a nu-null state
Ent relative_entropy_fv(const ExactMeasure& mu, const ExactMeasure& nu);

// extrapolation rule (frozen): least-squares fit of a + c/L through the
// largest 5 points; bracket is the hull of the last 3 raw values and the
// fitted density
EntropyEstimate extrapolate(const std::string& method,
                            std::vector<std::pair<int, double>> points);

EntropyEstimate relative_entropy_density(const MeasureFamily& mu, const MeasureFamily& nu,
                                         const std::vector<int>& schedule);

EntropyEstimate ks_entropy(const MeasureFamily& mu, const std::vector<int>& schedule);

// e_nu^lambda = -lim (1/|Lambda|) int log nu(xi_Lambda) lambda(dxi); exact
// when lambda's marginals are enumerable, MC with standard error otherwise
EntropyEstimate e_lambda(const MeasureFamily& nu, const MeasureFamily& lambda,
                         const std::vector<int>& schedule, int mc_samples = 0,
                         std::uint64_t seed = 0);

// e_nu^+ = e_nu^lambda with lambda = delta_plus (shared code path)
EntropyEstimate e_plus(const MeasureFamily& nu, const std::vector<int>& schedule);

struct SullivanResult {
  double value = 0.0;
  bool infinite = false;
  double e_plus_term = 0.0;
  double ks_term = 0.0;
  double d_term = 0.0;
};

// h(mu|nu) = e_nu^+ - h(mu) - E_mu[D(sigma^+)] with D from the kernel of phi;
// the D-average is an exact finite sum over the dependence-window marginal
SullivanResult sullivan_density(const Potential& phi, const MeasureFamily& mu,
                                const EntropyEstimate& eplus, const std::vector<int>& schedule);

// E_mu[D(sigma^+)] alone (exact finite sum)
double sullivan_d_average(const Potential& phi, const MeasureFamily& mu);
// MC variant over a sample set; returns (mean, standard error)
std::pair<double, double> sullivan_d_average_mc(const Potential& phi, const SampleSet& samples,
                                                const SpinAlphabet& alphabet);

// (1/|Lambda_n|) log mu(+_Lambda)/nu(+_Lambda) sequence and extrapolation
EntropyEstimate pressure_ratio_check(const MeasureFamily& mu, const MeasureFamily& nu,
                                     const std::vector<int>& schedule);

}  // namespace ggibbs

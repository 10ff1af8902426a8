#pragma once

#include <cmath>
#include <vector>

#include "ggibbs/measure.hpp"
#include "ggibbs/potential.hpp"

namespace ggibbs {

// Exact 1D solver for range-1 translation-invariant potentials.
// T(a,b) = exp(-(pair(a,b) + (field(a) + field(b)) / 2)); the half-field
// split keeps T symmetric so Perron data comes from a Jacobi diagonalization.
//
// Edge handling:
//   Bulk  — window marginal of the infinite translation-invariant chain,
//           P(s_1..s_n) = u(s_1) prod T u(s_n) / lambda^{n-1}
//   Free  — finite chain, free boundary (half fields restored at the edges)
//   Fixed — finite chain with a fixed symbol coupled at the edge
class TransferChain {
 public:
  enum class Edge { Bulk, Free, Fixed };

  static TransferChain from_potential(const Potential& phi);

  int q() const { return q_; }
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }  // second largest modulus
  double pressure() const;                     // log lambda1
  const std::vector<double>& perron() const { return perron_; }

  void set_edges(Edge left, Edge right, int left_sym = 0, int right_sym = 0);
  Edge left_edge() const { return left_; }

  // log probability of a full window assignment on n sites
  double log_prob(int n, const std::uint8_t* vals) const;
  // log probability of a block at positions [pos, pos+len) inside an n-site
  // window (Bulk: position-free, any n >= len)
  double log_block(int n, int pos, int len, const std::uint8_t* vals) const;
  // two blocks separated by `gap` unconstrained sites (Bulk edges)
  double log_two_blocks(int len_a, const std::uint8_t* a, int gap, int len_b,
                        const std::uint8_t* b) const;
  double cylinder_prob(int n, int pos, const std::vector<std::uint8_t>& vals) const {
    return std::exp(log_block(n, pos, static_cast<int>(vals.size()), vals.data()));
  }

  ExactMeasure marginal(int n) const;  // window [0, n-1]

  // <w(s_0) w(s_m)> and <w(s_0)> in the bulk chain for a site observable w
  double two_point(int m, const std::vector<double>& w) const;
  double one_point(const std::vector<double>& w) const;

  // exact decoupling envelope for two cylinders separated by `gap` sites
  double ad_log_ratio_bound(int gap) const;

 private:
  TransferChain() = default;
  void solve();
  std::vector<double> left_vec() const;
  std::vector<double> right_vec() const;

  int q_ = 2;
  std::vector<double> t_;     // q x q, row major
  std::vector<double> pair_;  // pair interaction table
  std::vector<double> field_;
  double lambda1_ = 0.0, lambda2_ = 0.0;
  std::vector<double> perron_;
  std::vector<double> eigvals_;
  std::vector<double> eigvecs_;  // rows
  Edge left_ = Edge::Bulk, right_ = Edge::Bulk;
  int left_sym_ = 0, right_sym_ = 0;
};

// Jacobi eigen-decomposition of a small symmetric matrix; returns
// eigenvalues (descending) and the matching orthonormal eigenvectors as rows.
void jacobi_symmetric(std::vector<double> a, int n, std::vector<double>& eigvals,
                      std::vector<double>& eigvecs);

}  // namespace ggibbs

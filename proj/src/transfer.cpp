#include "ggibbs/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ggibbs {

void jacobi_symmetric(std::vector<double> a, int n, std::vector<double>& eigvals,
                      std::vector<double>& eigvecs) {
  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
  auto A = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  auto V = [&](int i, int j) -> double& { return v[static_cast<std::size_t>(i) * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(A(p, q)) < 1e-300) continue;
        double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
  }
  // sort descending by eigenvalue, eigenvectors as rows
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) { return A(x, x) > A(y, y); });
  eigvals.assign(static_cast<std::size_t>(n), 0.0);
  eigvecs.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    eigvals[static_cast<std::size_t>(i)] = A(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    for (int k = 0; k < n; ++k)
      eigvecs[static_cast<std::size_t>(i) * n + k] = V(k, order[static_cast<std::size_t>(i)]);
  }
}

TransferChain TransferChain::from_potential(const Potential& phi) {
  if (phi.dim() != 1) throw std::invalid_argument("transfer chain: 1D potentials only");
  if (phi.range() > 1) throw std::invalid_argument("transfer chain: range-1 potentials only");
  if (!phi.anchored_terms().empty())
    throw std::invalid_argument("transfer chain: translation-invariant potentials only");
  TransferChain tc;
  const int q = phi.q();
  tc.q_ = q;
  tc.field_.assign(static_cast<std::size_t>(q), 0.0);
  std::vector<double> pair(static_cast<std::size_t>(q) * q, 0.0);
  for (const Term& t : phi.ti_terms()) {
    if (t.shape.size() == 1) {
      for (int a = 0; a < q; ++a) tc.field_[static_cast<std::size_t>(a)] += t.table[static_cast<std::size_t>(a)];
    } else if (t.shape.size() == 2 && t.shape.sites[0] == origin() && t.shape.sites[1] == site1(1)) {
      // index little-endian in shape order: a at 0, b at +1
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b)
          pair[static_cast<std::size_t>(a) * q + b] += t.table[static_cast<std::size_t>(a + q * b)];
    } else {
      throw std::invalid_argument("transfer chain: unsupported shape");
    }
  }
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      if (std::abs(pair[static_cast<std::size_t>(a) * q + b] - pair[static_cast<std::size_t>(b) * q + a]) >
          1e-14)
        throw std::invalid_argument("transfer chain: pair term must be symmetric");
  tc.t_.assign(static_cast<std::size_t>(q) * q, 0.0);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      tc.t_[static_cast<std::size_t>(a) * q + b] =
          std::exp(-(pair[static_cast<std::size_t>(a) * q + b] +
                     0.5 * (tc.field_[static_cast<std::size_t>(a)] + tc.field_[static_cast<std::size_t>(b)])));
  tc.pair_ = std::move(pair);
  tc.solve();
  return tc;
}

void TransferChain::solve() {
  std::vector<double> vals, vecs;
  jacobi_symmetric(t_, q_, vals, vecs);
  eigvals_ = vals;
  eigvecs_ = vecs;
  lambda1_ = vals[0];
  lambda2_ = 0.0;
  for (int i = 1; i < q_; ++i) lambda2_ = std::max(lambda2_, std::abs(vals[static_cast<std::size_t>(i)]));
  perron_.assign(static_cast<std::size_t>(q_), 0.0);
  double sign = vecs[0] >= 0 ? 1.0 : -1.0;
  for (int i = 0; i < q_; ++i) {
    perron_[static_cast<std::size_t>(i)] = sign * vecs[static_cast<std::size_t>(i)];
    if (!(perron_[static_cast<std::size_t>(i)] > 0))
      throw std::runtime_error("transfer chain: non-positive Perron vector");
  }
}

double TransferChain::pressure() const { return std::log(lambda1_); }

void TransferChain::set_edges(Edge left, Edge right, int left_sym, int right_sym) {
  left_ = left;
  right_ = right;
  left_sym_ = left_sym;
  right_sym_ = right_sym;
}

std::vector<double> TransferChain::left_vec() const {
  std::vector<double> l(static_cast<std::size_t>(q_));
  for (int a = 0; a < q_; ++a) {
    switch (left_) {
      case Edge::Bulk:
        l[static_cast<std::size_t>(a)] = perron_[static_cast<std::size_t>(a)];
        break;
      case Edge::Free:
        l[static_cast<std::size_t>(a)] = std::exp(-0.5 * field_[static_cast<std::size_t>(a)]);
        break;
      case Edge::Fixed:
        l[static_cast<std::size_t>(a)] =
            std::exp(-pair_[static_cast<std::size_t>(left_sym_) * q_ + a] -
                     0.5 * field_[static_cast<std::size_t>(a)]);
        break;
    }
  }
  return l;
}

std::vector<double> TransferChain::right_vec() const {
  std::vector<double> r(static_cast<std::size_t>(q_));
  for (int a = 0; a < q_; ++a) {
    switch (right_) {
      case Edge::Bulk:
        r[static_cast<std::size_t>(a)] = perron_[static_cast<std::size_t>(a)];
        break;
      case Edge::Free:
        r[static_cast<std::size_t>(a)] = std::exp(-0.5 * field_[static_cast<std::size_t>(a)]);
        break;
      case Edge::Fixed:
        r[static_cast<std::size_t>(a)] =
            std::exp(-pair_[static_cast<std::size_t>(a) * q_ + right_sym_] -
                     0.5 * field_[static_cast<std::size_t>(a)]);
        break;
    }
  }
  return r;
}

namespace {

// y = M^T x with log-scaling: returns log of the rescale factor
double scaled_step(const std::vector<double>& m, int q, std::vector<double>& x) {
  std::vector<double> y(static_cast<std::size_t>(q), 0.0);
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < q; ++i)
      y[static_cast<std::size_t>(j)] += x[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(i) * q + j];
  double mx = 0.0;
  for (double v : y) mx = std::max(mx, v);
  for (auto& v : y) v /= mx;
  x = std::move(y);
  return std::log(mx);
}

}  // namespace

double TransferChain::log_prob(int n, const std::uint8_t* vals) const {
  return log_block(n, 0, n, vals);
}

double TransferChain::log_block(int n, int pos, int len, const std::uint8_t* vals) const {
  if (pos < 0 || pos + len > n) throw std::invalid_argument("log_block: block outside window");
  if (left_ == Edge::Bulk && right_ == Edge::Bulk) {
    // position-free in the infinite chain
    double lp = std::log(perron_[vals[0]]) + std::log(perron_[vals[len - 1]]);
    for (int i = 0; i + 1 < len; ++i)
      lp += std::log(t_[static_cast<std::size_t>(vals[i]) * q_ + vals[i + 1]]);
    lp -= (len - 1) * std::log(lambda1_);
    return lp;
  }
  // finite chain: alpha from the left edge to pos, beta from the right edge
  std::vector<double> alpha = left_vec();
  double la = 0.0;
  for (int i = 0; i < pos; ++i) la += scaled_step(t_, q_, alpha);
  std::vector<double> beta = right_vec();
  double lb = 0.0;
  {
    // transpose propagation from the right: beta_j = sum_k T(j,k) beta_k
    std::vector<double> tt(static_cast<std::size_t>(q_) * q_);
    for (int i = 0; i < q_; ++i)
      for (int j = 0; j < q_; ++j)
        tt[static_cast<std::size_t>(i) * q_ + j] = t_[static_cast<std::size_t>(j) * q_ + i];
    for (int i = pos + len; i < n; ++i) lb += scaled_step(tt, q_, beta);
  }
  double w = std::log(alpha[vals[0]]) + la;
  for (int i = 0; i + 1 < len; ++i)
    w += std::log(t_[static_cast<std::size_t>(vals[i]) * q_ + vals[i + 1]]);
  w += std::log(beta[vals[len - 1]]) + lb;
  // normalizer Z = alpha(full propagation) . right_vec
  std::vector<double> az = left_vec();
  double lz = 0.0;
  for (int i = 0; i + 1 < n; ++i) lz += scaled_step(t_, q_, az);
  auto r = right_vec();
  double z = 0.0;
  for (int a = 0; a < q_; ++a) z += az[static_cast<std::size_t>(a)] * r[static_cast<std::size_t>(a)];
  lz += std::log(z);
  return w - lz;
}

double TransferChain::log_two_blocks(int len_a, const std::uint8_t* a, int gap, int len_b,
                                     const std::uint8_t* b) const {
  if (left_ != Edge::Bulk || right_ != Edge::Bulk)
    throw std::invalid_argument("log_two_blocks: bulk chain only");
  double lp = std::log(perron_[a[0]]) + std::log(perron_[b[len_b - 1]]);
  for (int i = 0; i + 1 < len_a; ++i)
    lp += std::log(t_[static_cast<std::size_t>(a[i]) * q_ + a[i + 1]]);
  for (int i = 0; i + 1 < len_b; ++i)
    lp += std::log(t_[static_cast<std::size_t>(b[i]) * q_ + b[i + 1]]);
  // bridge T^{gap+1}(a_last, b_first), log-scaled power
  std::vector<double> x(static_cast<std::size_t>(q_), 0.0);
  x[a[len_a - 1]] = 1.0;
  double lbridge = 0.0;
  for (int k = 0; k < gap + 1; ++k) lbridge += scaled_step(t_, q_, x);
  lp += lbridge + std::log(x[b[0]]);
  lp -= (len_a + len_b + gap - 1) * std::log(lambda1_);
  return lp;
}

ExactMeasure TransferChain::marginal(int n) const {
  Window w = Window::interval(0, n - 1);
  const std::int64_t ns = state_count(q_, n);
  std::vector<double> probs(static_cast<std::size_t>(ns));
  std::vector<std::uint8_t> vals(static_cast<std::size_t>(n));
  for (std::int64_t st = 0; st < ns; ++st) {
    decode_state(st, q_, n, vals.data());
    probs[static_cast<std::size_t>(st)] = std::exp(log_prob(n, vals.data()));
  }
  return ExactMeasure(w, q_, std::move(probs));
}

double TransferChain::two_point(int m, const std::vector<double>& w) const {
  // <w(s_0) w(s_m)> in the bulk chain
  std::vector<double> tm(static_cast<std::size_t>(q_) * q_, 0.0);
  for (int i = 0; i < q_; ++i) tm[static_cast<std::size_t>(i) * q_ + i] = 1.0;
  double lscale = 0.0;
  for (int k = 0; k < m; ++k) {
    std::vector<double> nxt(static_cast<std::size_t>(q_) * q_, 0.0);
    double mx = 0.0;
    for (int i = 0; i < q_; ++i)
      for (int j = 0; j < q_; ++j) {
        double v = 0.0;
        for (int l = 0; l < q_; ++l)
          v += tm[static_cast<std::size_t>(i) * q_ + l] * t_[static_cast<std::size_t>(l) * q_ + j];
        nxt[static_cast<std::size_t>(i) * q_ + j] = v;
        mx = std::max(mx, std::abs(v));
      }
    for (auto& v : nxt) v /= mx;
    lscale += std::log(mx);
    tm = std::move(nxt);
  }
  double s = 0.0;
  for (int i = 0; i < q_; ++i)
    for (int j = 0; j < q_; ++j)
      s += perron_[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)] *
           tm[static_cast<std::size_t>(i) * q_ + j] * w[static_cast<std::size_t>(j)] *
           perron_[static_cast<std::size_t>(j)];
  return s * std::exp(lscale - m * std::log(lambda1_));
}

double TransferChain::one_point(const std::vector<double>& w) const {
  double s = 0.0;
  for (int i = 0; i < q_; ++i)
    s += perron_[static_cast<std::size_t>(i)] * perron_[static_cast<std::size_t>(i)] *
         w[static_cast<std::size_t>(i)];
  return s;
}

double TransferChain::ad_log_ratio_bound(int gap) const {
  // |log P(A cap B) / (P(A) P(B))| <= -log(1 - rho) with
  // rho = sum_{m>=2} (|lambda_m|/lambda_1)^{gap+1} max_ij |e_m(i) e_m(j)| / (u_i u_j)
  double rho = 0.0;
  for (int m = 1; m < q_; ++m) {
    double mx = 0.0;
    for (int i = 0; i < q_; ++i)
      for (int j = 0; j < q_; ++j) {
        double num = std::abs(eigvecs_[static_cast<std::size_t>(m) * q_ + i] *
                              eigvecs_[static_cast<std::size_t>(m) * q_ + j]);
        double den = perron_[static_cast<std::size_t>(i)] * perron_[static_cast<std::size_t>(j)];
        mx = std::max(mx, num / den);
      }
    rho += std::pow(std::abs(eigvals_[static_cast<std::size_t>(m)]) / lambda1_, gap + 1) * mx;
  }
  if (rho >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::log1p(-rho);
}

}  // namespace ggibbs

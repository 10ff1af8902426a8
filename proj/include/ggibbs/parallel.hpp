#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ggibbs::par {

// Deterministic sharded reductions. The state space is cut into fixed-size
// shards; each shard is accumulated serially in index order and the shard
// results are merged by a binary fold in shard order. The result is therefore
// independent of the number of worker threads. The *_serial variants are the
// straightforward reference loops kept for testing and benchmarking.

inline constexpr std::int64_t kShardSize = 1 << 12;

void set_threads(int n);
int threads();
void set_parallel(bool on);
bool parallel_enabled();

namespace detail {

template <class T, class Merge>
T fold_pairwise(std::vector<T>& v, Merge merge) {
  // binary tree fold, fixed order
  std::size_t n = v.size();
  while (n > 1) {
    std::size_t m = 0;
    for (std::size_t i = 0; i + 1 < n; i += 2) v[m++] = merge(v[i], v[i + 1]);
    if (n % 2) v[m++] = v[n - 1];
    n = m;
  }
  return v[0];
}

struct LseAcc {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;  // sum of exp(x - max)
};

inline LseAcc lse_merge(const LseAcc& a, const LseAcc& b) {
  if (b.max == -std::numeric_limits<double>::infinity()) return a;
  if (a.max == -std::numeric_limits<double>::infinity()) return b;
  LseAcc r;
  r.max = std::max(a.max, b.max);
  r.sum = a.sum * std::exp(a.max - r.max) + b.sum * std::exp(b.max - r.max);
  return r;
}

}  // namespace detail

// log sum_{i<n} exp(f(i)) — serial reference: two passes with max subtraction
template <class F>
double logsumexp_serial(std::int64_t n, F&& f) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < n; ++i) m = std::max(m, f(i));
  double s = 0.0;
  for (std::int64_t i = 0; i < n; ++i) s += std::exp(f(i) - m);
  return m + std::log(s);
}

namespace detail {

template <class F>
LseAcc lse_shard(std::int64_t b, std::int64_t e, F&& f) {
  LseAcc a;
  for (std::int64_t i = b; i < e; ++i) {
    double x = f(i);
    if (x <= a.max) {
      a.sum += std::exp(x - a.max);
    } else {
      a.sum = a.sum * std::exp(a.max - x) + 1.0;
      a.max = x;
    }
  }
  return a;
}

}  // namespace detail

template <class F>
double logsumexp_sharded(std::int64_t n, F&& f) {
  const std::int64_t nshards = (n + kShardSize - 1) / kShardSize;
  std::vector<detail::LseAcc> acc(static_cast<std::size_t>(nshards));
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < nshards; ++s)
    acc[static_cast<std::size_t>(s)] =
        detail::lse_shard(s * kShardSize, std::min(n, (s + 1) * kShardSize), f);
  detail::LseAcc r = detail::fold_pairwise(acc, detail::lse_merge);
  return r.max + std::log(r.sum);
}

template <class F>
double logsumexp(std::int64_t n, F&& f) {
  if (!parallel_enabled()) return logsumexp_serial(n, std::forward<F>(f));
  if (n <= kShardSize) {  // single shard: same arithmetic, no omp region
    detail::LseAcc a = detail::lse_shard(0, n, f);
    return a.max + std::log(a.sum);
  }
  return logsumexp_sharded(n, std::forward<F>(f));
}

template <class F>
double sum_serial(std::int64_t n, F&& f) {
  double s = 0.0;
  for (std::int64_t i = 0; i < n; ++i) s += f(i);
  return s;
}

template <class F>
double sum_sharded(std::int64_t n, F&& f) {
  const std::int64_t nshards = (n + kShardSize - 1) / kShardSize;
  std::vector<double> acc(static_cast<std::size_t>(nshards), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < nshards; ++s) {
    const std::int64_t b = s * kShardSize;
    const std::int64_t e = std::min(n, b + kShardSize);
    double a = 0.0;
    for (std::int64_t i = b; i < e; ++i) a += f(i);
    acc[static_cast<std::size_t>(s)] = a;
  }
  return detail::fold_pairwise(acc, [](double a, double b) { return a + b; });
}

template <class F>
double sum(std::int64_t n, F&& f) {
  if (!parallel_enabled() || n <= kShardSize) return sum_serial(n, std::forward<F>(f));
  return sum_sharded(n, std::forward<F>(f));
}

template <class F>
std::pair<double, double> minmax(std::int64_t n, F&& f) {
  const std::int64_t nshards = (n + kShardSize - 1) / kShardSize;
  std::vector<std::pair<double, double>> acc(
      static_cast<std::size_t>(nshards),
      {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  const bool par = parallel_enabled();
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t s = 0; s < nshards; ++s) {
    const std::int64_t b = s * kShardSize;
    const std::int64_t e = std::min(n, b + kShardSize);
    auto& a = acc[static_cast<std::size_t>(s)];
    for (std::int64_t i = b; i < e; ++i) {
      double x = f(i);
      a.first = std::min(a.first, x);
      a.second = std::max(a.second, x);
    }
  }
  return detail::fold_pairwise(acc, [](auto a, auto b) {
    return std::pair<double, double>{std::min(a.first, b.first), std::max(a.second, b.second)};
  });
}

// Parallel loop over independent work items (disorder replicas, boundary
// sweeps). Items may be heavy, so any count above one is worth spreading;
// results land in caller-provided slots, merge order is the item order.
namespace detail {

// exceptions cannot cross an omp region; capture the first and rethrow after
class ExceptionGuard {
 public:
  template <class F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
#pragma omp critical(ggibbs_par_exception)
      if (!eptr_) eptr_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (eptr_) std::rethrow_exception(eptr_);
  }

 private:
  std::exception_ptr eptr_ = nullptr;
};

}  // namespace detail

template <class F>
void for_each_index(std::int64_t n, F&& f) {
  if (!parallel_enabled() || n <= 1) {
    for (std::int64_t i = 0; i < n; ++i) f(i);
    return;
  }
  detail::ExceptionGuard guard;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) guard.run([&] { f(i); });
  guard.rethrow();
}

// Fine-grained per-state loop (table fills); the omp region only pays off
// beyond a shard's worth of states.
template <class F>
void for_each_state(std::int64_t n, F&& f) {
  if (!parallel_enabled() || n <= kShardSize) {
    for (std::int64_t i = 0; i < n; ++i) f(i);
    return;
  }
  detail::ExceptionGuard guard;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) guard.run([&] { f(i); });
  guard.rethrow();
}

}  // namespace ggibbs::par

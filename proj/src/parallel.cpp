#include "ggibbs/parallel.hpp"

namespace ggibbs::par {

namespace {
bool g_parallel = true;
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_parallel(bool on) { g_parallel = on; }
bool parallel_enabled() { return g_parallel; }

}  // namespace ggibbs::par

#pragma once

#include <cstddef>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hedgekit {

// Worker cap: min(OpenMP default, HEDGEKIT_THREADS).  Values < 1 in the env
// var are ignored.
inline int max_threads() {
#ifdef _OPENMP
  int cap = omp_get_max_threads();
  if (const char* env = std::getenv("HEDGEKIT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1 && v < cap) cap = v;
  }
  return cap > 0 ? cap : 1;
#else
  return 1;
#endif
}

// Runs fn(i) for i in [0, n), possibly across threads.  fn must write only
// to its own index's slot; callers reduce the slots serially in index order
// afterwards, which is what makes results independent of the thread count.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
#ifdef _OPENMP
  const int threads = max_threads();
  if (threads > 1 && n > 1) {
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      fn(static_cast<std::size_t>(i));
    }
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace hedgekit

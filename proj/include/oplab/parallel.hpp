#pragma once

#include <cstddef>

#ifdef OPLAB_HAVE_OPENMP
#include <omp.h>
#endif

#include "oplab/common.hpp"

namespace oplab {

inline void set_worker_count(int n) {
#ifdef OPLAB_HAVE_OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// Evaluates fn(i) for i in [0, n). The parallel path distributes iterations
// over OpenMP threads; results must be written to per-index slots so that the
// caller can reduce them in a fixed order regardless of thread count.
template <class Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::Parallel) {
#ifdef OPLAB_HAVE_OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      fn(static_cast<std::size_t>(i));
    return;
#endif
  }
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace oplab

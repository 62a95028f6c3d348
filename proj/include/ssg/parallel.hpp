#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ssg {

// threads <= 0 means "use the OpenMP default". All parallel entry points in
// this library take a thread count so the serial path (threads == 1) stays
// available for determinism-sensitive builds and as the benchmark baseline.
inline int resolve_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

}  // namespace ssg

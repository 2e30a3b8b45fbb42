#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace warprl {

/// Execution mode for the data-parallel kernels. Every parallel kernel has a
/// serial reference path that produces bit-identical results; tests compare
/// the two and benchmarks time them.
enum class Exec { Serial, Parallel };

namespace parallel {

/// Threads used by Exec::Parallel kernels in the calling thread's regions.
inline void set_threads(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n > 0 ? n : 1);
#else
    (void)n;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline double wtime() {
#ifdef _OPENMP
    return omp_get_wtime();
#else
    return 0.0;
#endif
}

}  // namespace parallel
}  // namespace warprl

#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qbat {

/// Batch kernels carry both an OpenMP path and a serial reference path.
/// Per-index RNG streams make the two bit-identical, which the tests check.
enum class ExecPolicy { serial, parallel };

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace qbat

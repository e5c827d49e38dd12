// Execution policy for the data-parallel kernels. Every parallel entry
// point has a serial twin that produces bit-identical results; reductions
// run in a fixed order regardless of the policy.

#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spdcone {

enum class Exec { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace spdcone

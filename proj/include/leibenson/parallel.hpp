#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <string>

#include <omp.h>

namespace leibenson {

/// Worker count: an explicit request wins, then LEIBENSON_THREADS, then the
/// OpenMP default. Values below 1 are treated as "unset".
inline int resolve_workers(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LEIBENSON_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
    }
  }
  return omp_get_max_threads();
}

/// Static-scheduled loop over [0, n). Bodies must only write state owned by
/// their index so results never depend on the schedule.
template <class Body>
void parallel_for(std::int64_t n, int workers, Body&& body) {
#pragma omp parallel for num_threads(workers) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace leibenson

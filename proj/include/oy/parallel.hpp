#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace oy {

/// Worker count: k > 0 as given, otherwise the OpenMP default.
inline int resolve_workers(int k) { return k > 0 ? k : omp_get_max_threads(); }

/// Runs body(i) for i in [0, n) over replicates. Results must be written to
/// index-keyed storage; the first exception thrown is rethrown afterwards.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  std::exception_ptr error;
  std::mutex guard;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(resolve_workers(workers))
  for (long long i = 0; i < count; ++i) {
    {
      std::lock_guard<std::mutex> lock(guard);
      if (error) continue;
    }
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace oy

#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hrks {

// Cell-parallel kernel driver. Callers must only write to slots owned by
// index i; reductions are done afterwards in index order so that results
// match the serial path bit for bit. use_threads=false is the serial
// reference used by the tests and the benchmark.
template <class F>
void parallel_for(std::size_t n, F&& fn, bool use_threads = true) {
  if (!use_threads) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    fn(static_cast<std::size_t>(i));
#else
  for (std::size_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace hrks

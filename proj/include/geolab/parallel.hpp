#pragma once
#include <cstddef>

namespace geolab {

// Worker-pool size for the data-parallel kernels. 0 = all available cores,
// 1 = the plain serial loops (the reference path used by the tests and the
// benchmark). Set once by the CLI before any compute call.
void set_jobs(int jobs);
int jobs();

namespace detail {
int resolved_jobs();
}

// Runs fn(i) for i in [0, n). Every kernel built on this writes to a
// preallocated slot per index and reduces serially afterwards, so the
// output is identical for every jobs value.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
  const int nj = detail::resolved_jobs();
  if (nj <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
#pragma omp parallel for schedule(dynamic, 1) num_threads(nj)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    fn(static_cast<std::size_t>(i));
}

}  // namespace geolab

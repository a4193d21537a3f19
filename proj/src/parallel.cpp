#include "geolab/parallel.hpp"

#include <omp.h>

#include <atomic>

namespace geolab {

namespace {
std::atomic<int> g_jobs{0};
}

void set_jobs(int jobs) { g_jobs.store(jobs < 0 ? 0 : jobs); }
int jobs() { return g_jobs.load(); }

namespace detail {
int resolved_jobs() {
  const int j = g_jobs.load();
  return j == 0 ? omp_get_max_threads() : j;
}
}  // namespace detail

}  // namespace geolab

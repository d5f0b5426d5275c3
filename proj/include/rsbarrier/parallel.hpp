#pragma once

#include <cstddef>
#include <functional>

namespace rsb {

// Thread count from RSB_THREADS, else hardware concurrency (at least 1).
int default_thread_count();

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index runs
// exactly once; results must be written to per-index slots so that the
// outcome does not depend on the schedule. The first exception is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace rsb

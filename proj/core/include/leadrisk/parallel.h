#pragma once

#include <cstddef>
#include <functional>

namespace leadrisk {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is executed
// exactly once; callers write results into per-index slots so the outcome never
// depends on the schedule. The first exception thrown by any task is rethrown.
void ParallelFor(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// Clamp a user-requested thread count to [1, hardware concurrency * 4].
int NormalizeThreads(int requested);

}  // namespace leadrisk

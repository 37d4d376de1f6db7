#pragma once

#include <cstddef>
#include <functional>

namespace prlab {

/// Worker count from PRLAB_THREADS, else the hardware concurrency (at least 1).
int thread_count();

/// Runs fn(i) for i in [0, n) on up to thread_count() threads. The first exception thrown by
/// any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace prlab

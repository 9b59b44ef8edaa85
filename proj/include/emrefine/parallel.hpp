#pragma once

#include <cstddef>
#include <functional>

namespace emrefine {

/// Worker count: MPP_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n). Each index is handled by exactly one worker,
/// so bodies writing to disjoint outputs produce order-independent results.
/// The first exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace emrefine

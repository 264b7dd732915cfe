#pragma once

#include <cstddef>
#include <functional>

namespace toonwarp {

/// Worker count: hardware concurrency, capped by TOONWARP_THREADS when set.
std::size_t thread_count();

/// Runs body(i) for i in [0, n) across worker threads. Each index is handled
/// by exactly one call, so bodies that write disjoint outputs give results
/// identical to a sequential loop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace toonwarp

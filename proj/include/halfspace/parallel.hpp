#pragma once

#include <cstddef>
#include <functional>

namespace halfspace {

/// Worker count: HALFSPACE_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, n). Static contiguous partition, so every index is
/// computed by exactly one worker and results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace halfspace

#pragma once

#include <cstddef>
#include <functional>

namespace transg::numerics {

// Worker count: hardware concurrency, capped by the TRANSG_THREADS
// environment variable when set.
std::size_t worker_threads();

// Runs fn(begin, end) over a static partition of [0, n). Chunks write to
// disjoint outputs, so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace transg::numerics

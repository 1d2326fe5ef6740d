#pragma once

#include <cstddef>
#include <functional>

namespace freemax {

// Run chunk_fn(begin, end) over a partition of [0, n) across hardware threads.
// Falls back to a single serial call for small n.  The first exception thrown
// inside a worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& chunk_fn,
                  std::size_t min_per_thread = 64);

} // namespace freemax

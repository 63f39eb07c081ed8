#pragma once

#include <cstddef>
#include <functional>

namespace durasim {

// Worker count: hardware concurrency, capped by DURASIM_THREADS when set.
unsigned worker_count();

// Calls body(i) for every i in [0, count) using up to `workers` threads
// (0 = worker_count()). Indices are split into contiguous blocks, so any
// per-index output is independent of the thread count. The first exception
// thrown by a body is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned workers = 0);

}  // namespace durasim

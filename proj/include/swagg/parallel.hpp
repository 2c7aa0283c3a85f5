#pragma once

#include <cstddef>
#include <functional>

namespace swagg {

// Worker count: `requested` if positive, else hardware concurrency, always
// capped by the SWAGG_THREADS environment variable when set.
int effective_threads(int requested = 0);

// Runs fn(0..n-1) across workers. Task order within a worker is ascending;
// callers must write results into disjoint slots. The first exception thrown
// by any task is rethrown on the calling thread.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace swagg

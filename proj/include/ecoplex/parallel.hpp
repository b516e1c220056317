#pragma once

#include <cstddef>
#include <functional>

namespace ecoplex {

// Worker cap: ECOPLEX_THREADS when set (>=1), hardware concurrency otherwise.
int max_threads();

// Runs fn(0..count-1) across worker threads. Each index owns its output
// slot, so results never depend on scheduling. The first exception thrown
// by any worker is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace ecoplex

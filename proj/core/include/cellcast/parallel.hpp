#pragma once

#include <cstddef>
#include <functional>

namespace cellcast {

/// Worker count taken from CELLCAST_THREADS; 1 when unset or invalid.
std::size_t thread_count();

/// Calls fn(i) for every i in [0, n). With one worker the calls run in
/// index order on the calling thread. Callers must make each fn(i) write
/// only to its own slot so results never depend on scheduling. The first
/// exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace cellcast

#pragma once

#include <cstddef>
#include <functional>

namespace pdm {

/// Caps the number of worker threads used by parallel_for. 0 means
/// std::thread::hardware_concurrency().
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(i) for every i in [0, n). Work is split into contiguous
/// chunks; callers must write results into pre-sized slots so output does
/// not depend on scheduling. The first exception thrown by any worker is
/// rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pdm

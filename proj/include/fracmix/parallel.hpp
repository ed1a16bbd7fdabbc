#pragma once

#include <cstddef>
#include <functional>

namespace fracmix {

/// Worker count used by parallel_for; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls fn(i) for i in [0, n) on up to thread_count() threads. Each index is
/// handled exactly once and callers write only to slot i, so results do not
/// depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fracmix

#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace cyclicwave {

/// Worker count for data-parallel loops. Honors CYCLICWAVE_THREADS when set to a positive
/// integer, otherwise std::thread::hardware_concurrency().
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads using contiguous chunks.
/// Output ordering is the caller's business: body must write to slot i only.
/// If any iteration throws, the exception from the lowest index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace cyclicwave

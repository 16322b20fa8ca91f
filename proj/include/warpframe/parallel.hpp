#pragma once

#include <cstddef>
#include <functional>

namespace warpframe {

/// Worker cap: WARPFRAME_THREADS when set to a positive integer, otherwise the hardware count.
unsigned worker_count();

/// Runs body(i) for i in [0, count). Each index is handled by exactly one
/// worker; callers write results into per-index slots and reduce serially.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace warpframe

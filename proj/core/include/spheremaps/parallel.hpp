#pragma once

#include <cstdint>
#include <functional>

namespace spheremaps {

/// Worker count from the SPHEREMAPS_WORKERS environment variable, falling
/// back to the hardware concurrency.
int default_worker_count();

/// Runs body(i) for i in [0, n). With more than one worker the indices are
/// distributed over threads; callers own any result buffers and must reduce
/// them in index order to keep outputs deterministic.
void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& body);

}  // namespace spheremaps

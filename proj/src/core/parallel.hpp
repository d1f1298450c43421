#pragma once

#include <cstddef>
#include <functional>

namespace ipslab {

/// Worker count: IPS_LAB_THREADS if set and positive, otherwise the hardware
/// concurrency. Can be overridden programmatically.
std::size_t worker_count();
void set_worker_count(std::size_t workers);

/// Runs body(i) for i in [0, count). Every index runs exactly once; callers
/// write results into per-index slots so the outcome never depends on
/// scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ipslab

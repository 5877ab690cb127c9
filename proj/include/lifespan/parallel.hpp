#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace lifespan {

/// Worker count used when a caller passes 0: hardware concurrency, at least 1.
int default_workers();

/// Runs task(i) for every i in [0, count) on up to `workers` threads
/// (0 = default_workers()). Work is handed out by index; callers write
/// results into per-index slots and reduce them in index order, so results
/// do not depend on the worker count. The first exception thrown by a task
/// is rethrown after all workers have stopped.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

/// Counter-based random numbers: the value for (seed, index, stream) does
/// not depend on evaluation order.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t index, std::uint64_t stream);

/// Uniform double in [0, 1) from counter_hash.
inline double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  return static_cast<double>(counter_hash(seed, index, stream) >> 11) * 0x1.0p-53;
}

}  // namespace lifespan

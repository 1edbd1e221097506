#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace gauss_counter {

/// Number of worker threads to use: GAUSS_COUNTER_THREADS when set to a
/// positive integer, otherwise the hardware concurrency (at least 1).
unsigned worker_count();

/// Runs `task(i)` for i in [0, count) on up to worker_count() threads.
/// Tasks must write only to their own output slot; the first exception thrown
/// by any task is rethrown after all workers have joined.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

/// SplitMix64 step, used to derive per-shard seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of shard `index` under master seed `seed`. Fixed schedule so that
/// results do not depend on the number of workers.
std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace gauss_counter

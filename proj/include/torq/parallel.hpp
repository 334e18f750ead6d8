#pragma once

#include <cstddef>
#include <functional>

namespace torq {

/// Calls fn(i) for every i in [0, count) on up to `workers` threads (0 means
/// hardware concurrency). Callers write results into per-index slots, so the
/// output never depends on scheduling. Once a task throws no new indices are
/// started; after all threads join the exception from the lowest failing index
/// is rethrown. Every lower index has already been claimed by then, so the
/// reported failure is the same for any worker count.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace torq

#pragma once

#include <cstddef>
#include <functional>

namespace compsupp {

/// Number of worker threads to use for `requested` (0 means hardware concurrency).
std::size_t resolve_threads(std::size_t requested);

/// Runs body(i) for i in [0, count) on up to `threads` workers using static
/// contiguous chunks. Callers write results by index, so output never depends
/// on the thread count. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace compsupp

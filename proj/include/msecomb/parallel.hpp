#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace msecomb {

/// Worker count: MSE_COMBINE_THREADS when set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once; callers write results by index so output order never
/// depends on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = thread_count());

/// splitmix64 finalizer, used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace msecomb

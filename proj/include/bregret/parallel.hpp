#pragma once

#include <cstddef>
#include <functional>

namespace bregret {

// std::thread::hardware_concurrency(), at least 1.
unsigned default_workers();

// Calls body(i) for every i in [0, count) on up to `workers` threads. Indices
// are split into fixed strided slices, so a body that writes only to slot i
// produces the same result for any worker count. The first exception thrown
// by a body is rethrown after all threads join.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace bregret

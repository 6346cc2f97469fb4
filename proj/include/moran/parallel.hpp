#pragma once

#include <cstddef>
#include <functional>

namespace moran {

/// Worker count used when a caller passes 0. Reads MORAN_THREADS, falling
/// back to the hardware concurrency.
unsigned default_thread_count();

/// Runs body(i) for i in [0, n) across `threads` workers (0 = default).
/// Work is split into contiguous static chunks, so any per-index output that
/// body writes is identical to a serial run. The first exception thrown by a
/// worker is rethrown on the calling thread.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace moran

#pragma once

#include <cstddef>
#include <functional>

namespace hyperdist {

// Number of worker threads to use when the caller passes jobs = 0.
unsigned default_jobs();

// Runs fn(i) for i in [0, n). With jobs > 1 the index range is split into
// contiguous blocks, one per worker. Results must be written to per-index
// slots so the outcome is identical for any job count. The first exception
// thrown by a worker is rethrown on the calling thread.
void parallel_for(std::size_t n, unsigned jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace hyperdist

#pragma once

#include <cstddef>
#include <functional>

namespace qpulse {

/// Worker count used by grid sweeps and ensemble evaluations: the
/// QPULSE_WORKERS environment variable when set (clamped to >= 1), otherwise
/// the hardware concurrency.
unsigned worker_count();

/// Runs fn(i) for i in [0, n) on up to `workers` threads (0 = worker_count()).
/// Indices are partitioned statically, so writes to slot i are race-free and
/// results do not depend on the worker count.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace qpulse

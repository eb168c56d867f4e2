#pragma once

#include <cstddef>
#include <functional>

namespace garchqr {

/// Worker count resolution: explicit request > GARCHQR_WORKERS env var >
/// hardware concurrency. Always at least 1.
unsigned resolve_workers(int requested = 0);

/// Runs fn(i) for i in [0, count) on a small thread pool. Work items are
/// handed out by an atomic counter; callers must write results into
/// index-addressed slots so the outcome is independent of scheduling.
/// The first exception (by lowest index) is rethrown on the caller thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, int workers = 0);

} // namespace garchqr

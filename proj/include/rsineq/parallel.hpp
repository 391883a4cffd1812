#pragma once

#include <cstddef>
#include <functional>

namespace rsineq {

/// Worker threads to use: $RSINEQ_THREADS when set to a positive integer,
/// otherwise the hardware concurrency.
std::size_t worker_count();

/// Runs fn(0..tasks-1) across `workers` threads (0 = worker_count()). Tasks are
/// independent; the first exception thrown is rethrown after all workers stop.
void parallel_for(std::size_t tasks, const std::function<void(std::size_t)>& fn, std::size_t workers = 0);

}  // namespace rsineq

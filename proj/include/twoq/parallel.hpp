#pragma once

#include <cstddef>
#include <functional>

namespace twoq {

/// Global cap on worker threads (default: hardware concurrency). Results are
/// independent of the cap; it only bounds wall-clock parallelism.
void set_worker_threads(unsigned n);
unsigned worker_threads();

/// Runs fn(0), ..., fn(num_tasks - 1) on up to worker_threads() threads.
/// Exceptions from tasks are rethrown on the calling thread.
void parallel_for_each(std::size_t num_tasks, const std::function<void(std::size_t)>& fn);

} // namespace twoq

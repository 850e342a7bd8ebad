#pragma once

#include <functional>

namespace rigidflow {

// Worker count from RIGIDFLOW_THREADS (0 or unset = hardware concurrency).
int worker_count();

// Runs fn(i) for i in [0, n). Iterations must write disjoint state; the
// static partition keeps results schedule-independent.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace rigidflow

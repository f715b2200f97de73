#pragma once

#include <functional>

namespace dqc1lab {

/// Number of workers: hardware concurrency, capped by the DQC1LAB_THREADS
/// environment variable when set.
int worker_count();

/// Runs f(0..n-1), possibly concurrently. Callers own determinism: write
/// results by index and derive per-index RNG seeds so the schedule cannot
/// change any output.
void parallel_for(int n, const std::function<void(int)>& f);

}  // namespace dqc1lab

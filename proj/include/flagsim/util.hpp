#pragma once

#include <functional>

namespace flagsim {

/// Thread cap from FLAGSIM_THREADS (>= 1), defaulting to the hardware
/// concurrency when unset.
int thread_budget();

/// Run fn(0..n-1) across at most `threads` workers (0 = thread_budget()).
/// Indices are independent; results must be written to per-index slots so the
/// outcome is bitwise independent of the worker count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace flagsim

#pragma once

#include <functional>

namespace nozzleflow {

/// Worker cap from NOZZLEFLOW_THREADS, else the hardware thread count.
int worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks never
/// overlap, so bodies writing to disjoint per-index slots stay deterministic.
void parallel_for(int n, const std::function<void(int, int)>& body);

}  // namespace nozzleflow

#pragma once

#include <cstddef>
#include <functional>

namespace rcm {

// Runs fn(0..count-1) on up to `workers` threads.  Work items must be
// independent; callers that aggregate store per-item results and reduce in
// index order, so the outcome does not depend on the worker count.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn);

// RCM_LAB_WORKERS env var, else hardware concurrency, else 1.
int default_workers();

}  // namespace rcm

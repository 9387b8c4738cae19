#pragma once

#include <functional>

namespace otfs {

/// Worker count: OTFSLINK_WORKERS when set, else hardware concurrency.
int worker_count();

/// Runs fn(0..n-1); order of execution is unspecified, so fn must write to
/// disjoint state. Results must not depend on the worker count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace otfs

#pragma once

#include <functional>

#include <Eigen/Core>

namespace hsfuse {

/// Worker count used by per-band and per-frequency loops. 1 forces serial execution.
void set_thread_count(int threads);
int thread_count();

/// Runs body(i) for i in [0, n). Iterations must write disjoint outputs; results do not
/// depend on the thread count.
void parallel_for(Eigen::Index n, const std::function<void(Eigen::Index)>& body);

}  // namespace hsfuse

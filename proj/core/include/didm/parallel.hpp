#pragma once

#include <functional>

#include <Eigen/Dense>

namespace didm {

/// Worker count: DIDM_THREADS when set (clamped to >= 1), otherwise
/// hardware concurrency.
int worker_count();

/// Runs fn(0..count-1) across workers. Each index is processed exactly once;
/// the first exception thrown by any worker is rethrown after the join.
void parallel_for(Eigen::Index count, const std::function<void(Eigen::Index)>& fn);

}  // namespace didm

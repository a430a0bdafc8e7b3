#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace homog {

/// Worker count: hardware concurrency, capped by HOMOG_UC_THREADS when set.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n). Each index must only write its own outputs,
/// so results do not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Pairwise (tree) summation; fixed reduction order.
double pairwise_sum(std::span<const double> v);

}  // namespace homog

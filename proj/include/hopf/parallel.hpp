#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hopf::parallel {

/// Worker count for node-parallel loops. Defaults to HOPF_THREADS or 1.
int thread_count();
void set_thread_count(int n);

/// Calls fn(i) for i in [0, count). Each index is visited exactly once; the
/// partition into threads never affects results written to per-index slots.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& fn);

/// Pairwise (cascade) summation in fixed index order.
double pairwise_sum(std::span<const double> values);

/// Evaluates fn at every index in parallel and reduces with pairwise_sum.
template <class F>
double map_reduce(std::size_t count, F&& fn) {
  std::vector<double> values(count);
  for_each_index(count, [&](std::size_t i) { values[i] = fn(i); });
  return pairwise_sum(values);
}

}  // namespace hopf::parallel

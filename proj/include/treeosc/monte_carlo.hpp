#pragma once

// Direct simulation of the random binary splitting procedure: a group of m
// items costs one step, and if m >= 2 it is split by fair coin flips into two
// groups that are processed in turn.

#include <cstdint>
#include <vector>

#include "treeosc/random.hpp"

namespace treeosc::mc {

/// Steps used on a group of n items. Uses an explicit stack, so any n works.
template <class Gen>
std::uint64_t simulate_cost(std::uint64_t n, Gen& gen) {
  std::vector<std::uint64_t> stack{n};
  std::uint64_t steps = 0;
  while (!stack.empty()) {
    const std::uint64_t m = stack.back();
    stack.pop_back();
    ++steps;
    if (m <= 1) continue;
    const std::uint64_t left = fair_binomial(gen, m);
    stack.push_back(m - left);
    stack.push_back(left);
  }
  return steps;
}

struct CostEstimate {
  std::uint64_t n = 0;
  std::uint64_t replicas = 0;
  double mean = 0.0;
  double std_error = 0.0;  ///< sample standard deviation / sqrt(replicas)
  std::uint64_t seed = 0;
  /// true when every replica cost was odd (checked for n >= 2)
  bool all_odd = true;
};

/// Replica i runs on make_stream(master_seed, i). The result does not depend on
/// `threads` (0 picks the hardware concurrency).
CostEstimate estimate_mean_cost(std::uint64_t n, std::uint64_t replicas, std::uint64_t master_seed,
                                unsigned threads = 0);

/// Costs of replicas [0, count) for the given seed, in replica order.
std::vector<std::uint64_t> replica_costs(std::uint64_t n, std::uint64_t count, std::uint64_t master_seed);

}  // namespace treeosc::mc

#include "treeosc/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace treeosc::mc {

std::vector<std::uint64_t> replica_costs(std::uint64_t n, std::uint64_t count, std::uint64_t master_seed) {
  std::vector<std::uint64_t> costs(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Rng gen = make_stream(master_seed, i);
    costs[i] = simulate_cost(n, gen);
  }
  return costs;
}

CostEstimate estimate_mean_cost(std::uint64_t n, std::uint64_t replicas, std::uint64_t master_seed,
                                unsigned threads) {
  if (replicas < 2) throw std::invalid_argument("estimate_mean_cost requires at least 2 replicas");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, replicas));

  std::vector<std::uint64_t> costs(replicas);
  const auto run = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      Rng gen = make_stream(master_seed, i);
      costs[i] = simulate_cost(n, gen);
    }
  };
  if (threads == 1) {
    run(0, replicas);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (replicas + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(replicas, begin + chunk);
      if (begin < end) pool.emplace_back(run, begin, end);
    }
  }

  // Welford in replica order keeps the result independent of the schedule.
  CostEstimate est;
  est.n = n;
  est.replicas = replicas;
  est.seed = master_seed;
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < replicas; ++i) {
    const double x = static_cast<double>(costs[i]);
    const double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
    if (n >= 2 && costs[i] % 2 == 0) est.all_odd = false;
  }
  est.mean = mean;
  const double variance = m2 / static_cast<double>(replicas - 1);
  est.std_error = std::sqrt(variance / static_cast<double>(replicas));
  return est;
}

}  // namespace treeosc::mc

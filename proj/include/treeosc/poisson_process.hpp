#pragma once

// Homogeneous Poisson processes on (0, t]: counts, sample paths, the
// splitting of a Poisson number of balls among urns, and the uniform order
// statistics that describe the points given their number.

#include <cstdint>
#include <vector>

#include "treeosc/random.hpp"

namespace treeosc::poisson {

/// Points of a rate-intensity process on (0, horizon]. The constructor rejects
/// points that are not strictly increasing or fall outside (0, horizon].
class PointProcessSample {
 public:
  PointProcessSample(double intensity, double horizon, std::vector<double> points);

  double intensity() const { return intensity_; }
  double horizon() const { return horizon_; }
  const std::vector<double>& points() const { return points_; }
  std::size_t count() const { return points_.size(); }

 private:
  double intensity_;
  double horizon_;
  std::vector<double> points_;
};

/// Poisson(lambda) by inversion; above lambda = 30 the search starts at the mode
/// and alternates outwards with pmf ratios.
std::uint64_t sample_poisson_count(double lambda, Rng& gen);

/// Cumulative Exp(lambda) gaps until the horizon is passed.
PointProcessSample sample_process(double lambda, double horizon, Rng& gen);

/// Throws each of x balls into one of n_urns uniformly.
std::vector<std::uint64_t> split_count(std::uint64_t x, std::uint64_t n_urns, Rng& gen);

/// n independent uniforms on [0, horizon], sorted.
std::vector<double> conditional_order_statistics(std::uint64_t n, double horizon, Rng& gen);

/// P(X = k) for X ~ Poisson(lambda).
double poisson_pmf(double lambda, std::uint64_t k);

}  // namespace treeosc::poisson

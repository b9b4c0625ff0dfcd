#include "treeosc/poisson_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace treeosc::poisson {

PointProcessSample::PointProcessSample(double intensity, double horizon, std::vector<double> points)
    : intensity_(intensity), horizon_(horizon), points_(std::move(points)) {
  if (!(intensity > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("intensity and horizon must be positive");
  double previous = 0.0;
  for (double p : points_) {
    if (!(p > previous) || p > horizon) throw std::invalid_argument("points must increase strictly within (0, horizon]");
    previous = p;
  }
}

double poisson_pmf(double lambda, std::uint64_t k) {
  if (!(lambda > 0.0)) throw std::invalid_argument("poisson_pmf requires lambda > 0");
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0));
}

std::uint64_t sample_poisson_count(double lambda, Rng& gen) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("poisson count requires lambda > 0");
  double u = uniform_open_closed(gen);
  if (lambda <= 30.0) {
    double p = std::exp(-lambda);
    std::uint64_t k = 0;
    while (u > p) {
      u -= p;
      ++k;
      p *= lambda / static_cast<double>(k);
      if (p == 0.0) return k;  // u lost to rounding in the far tail
    }
    return k;
  }
  const auto mode = static_cast<std::uint64_t>(std::floor(lambda));
  double p_up = poisson_pmf(lambda, mode);
  double p_down = p_up;
  std::uint64_t up = mode;
  std::uint64_t down = mode;
  u -= p_up;
  if (u <= 0.0) return mode;
  for (;;) {
    bool moved = false;
    if (down > 0) {
      p_down *= static_cast<double>(down) / lambda;
      --down;
      u -= p_down;
      if (u <= 0.0) return down;
      moved = true;
    }
    p_up *= lambda / static_cast<double>(up + 1);
    ++up;
    u -= p_up;
    if (u <= 0.0) return up;
    if (!moved && p_up == 0.0) return up;
    if (p_up == 0.0 && p_down == 0.0) return up;
  }
}

PointProcessSample sample_process(double lambda, double horizon, Rng& gen) {
  if (!(lambda > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("sample_process requires lambda, horizon > 0");
  std::vector<double> points;
  double t = 0.0;
  for (;;) {
    const double next = t + standard_exponential(gen) / lambda;
    if (next > horizon) break;
    if (next > t) points.push_back(next);  // a gap below the spacing of doubles at t collapses
    t = next;
  }
  return PointProcessSample(lambda, horizon, std::move(points));
}

std::vector<std::uint64_t> split_count(std::uint64_t x, std::uint64_t n_urns, Rng& gen) {
  if (n_urns == 0) throw std::invalid_argument("split_count requires at least one urn");
  std::vector<std::uint64_t> urns(n_urns, 0);
  for (std::uint64_t i = 0; i < x; ++i) ++urns[bounded_uniform(gen, n_urns)];
  return urns;
}

std::vector<double> conditional_order_statistics(std::uint64_t n, double horizon, Rng& gen) {
  if (n == 0) throw std::invalid_argument("conditional_order_statistics requires n >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("conditional_order_statistics requires horizon > 0");
  std::vector<double> points(n);
  for (auto& p : points) p = horizon * uniform_closed_open(gen);
  std::sort(points.begin(), points.end());
  return points;
}

}  // namespace treeosc::poisson

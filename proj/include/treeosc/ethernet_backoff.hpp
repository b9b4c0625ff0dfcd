#pragma once

// Backoff counter of a single station in a saturated channel. L(0) = 1 and at
// each slot the counter k increments with probability a^k, otherwise stays.
// For Ethernet a = 1/2.
//
// With b = 1/a, L(t) - log_b(t) does not converge in distribution: along
// t = b^{n+x} it approaches ceil(x - log_b H) - x, where
// H = sum_{k>=0} a^k E_k for i.i.d. unit exponentials E_k.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "treeosc/random.hpp"

namespace treeosc::ethernet {

inline constexpr double kEthernetRatio = 0.5;

/// Exact law of L(t). probs[i] = P(L(t) = first_counter + i); the support may be
/// trimmed, with the discarded probability in truncation_mass.
struct BackoffDistribution {
  double a = kEthernetRatio;
  std::uint64_t t = 0;
  std::uint32_t first_counter = 1;
  std::vector<double> probs;
  double truncation_mass = 0.0;

  double prob(std::uint64_t counter) const;
  /// P(L(t) <= counter)
  double cdf(std::uint64_t counter) const;
  double mean() const;
  double total_mass() const;
  std::uint64_t last_counter() const { return first_counter + probs.size() - 1; }
};

/// Forward iteration p_{t+1}(k) = p_t(k)(1 - a^k) + p_t(k-1) a^{k-1} from a point
/// mass at 1. End entries are dropped while the cumulative dropped mass stays
/// within tail_cut.
class BackoffChain {
 public:
  BackoffChain(double a, double tail_cut = 1e-15);

  void step();
  void advance(std::uint64_t steps);
  void advance_to(std::uint64_t t);
  const BackoffDistribution& distribution() const { return dist_; }
  std::uint64_t time() const { return dist_.t; }

 private:
  double increment_probability(std::uint64_t counter);
  void trim();

  BackoffDistribution dist_;
  double tail_cut_;
  std::vector<double> powers_;  // powers_[k] = a^k
  std::vector<double> scratch_;
};

/// Distributions for every t = 0..t_max.
std::vector<BackoffDistribution> chain_distribution(double a, std::uint64_t t_max, double tail_cut = 1e-15);

/// Distribution at a single time t.
BackoffDistribution chain_distribution_at(double a, std::uint64_t t, double tail_cut = 1e-15);

/// Distributions at the given non-decreasing times, from one chain run.
std::vector<BackoffDistribution> chain_snapshots(double a, const std::vector<std::uint64_t>& times,
                                                 double tail_cut = 1e-15);

/// Slots spent in state k before incrementing: P(T >= n) = (1-a^k)^{n-1}, n >= 1,
/// mean a^-k. The zero-based sojourn 'T - 1' has P(T - 1 >= n) = (1-a^k)^n.
template <class Gen>
std::uint64_t sample_sojourn(double a, std::uint64_t counter, Gen& gen) {
  const double p = std::pow(a, static_cast<double>(counter));
  if (p >= 1.0) return 1;
  const double log_keep = std::log1p(-p);
  if (log_keep == 0.0) return UINT64_MAX;
  const double draw = std::floor(std::log(uniform_open_closed(gen)) / log_keep);
  if (!(draw < 1.8e19)) return UINT64_MAX;
  return 1 + static_cast<std::uint64_t>(draw);
}

/// Path L(0..t_max) built from sampled sojourns.
template <class Gen>
std::vector<std::uint32_t> sample_counter_path(double a, std::uint64_t t_max, Gen& gen) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("backoff ratio must lie in (0, 1)");
  std::vector<std::uint32_t> path;
  path.reserve(t_max + 1);
  std::uint32_t counter = 1;
  while (path.size() <= t_max) {
    const std::uint64_t stay = sample_sojourn(a, counter, gen);
    const std::uint64_t room = t_max + 1 - path.size();
    path.insert(path.end(), static_cast<std::size_t>(std::min(stay, room)), counter);
    ++counter;
  }
  return path;
}

/// L(t) alone, without materializing the path.
template <class Gen>
std::uint32_t sample_counter_at(double a, std::uint64_t t, Gen& gen) {
  std::uint32_t counter = 1;
  std::uint64_t elapsed = 0;  // time at which the current state was entered
  for (;;) {
    const std::uint64_t stay = sample_sojourn(a, counter, gen);
    if (stay > t - elapsed) return counter;
    elapsed += stay;
    ++counter;
  }
}

/// Parameters of the density of H:
/// h(x) = prefactor * sum_{n=0}^{depth} c_n a^-n exp(-a^-n x) with
/// prefactor = 1 / prod_{k>=1}(1 - a^k) and c_n = prefactor / prod_{k=1}^n (1 - a^-k).
struct HDensitySpec {
  double a = kEthernetRatio;
  int depth = 0;
  double prefactor = 0.0;
  std::vector<double> coeffs;
  /// Smallest x at which h keeps its rel_precision; below it the alternating
  /// terms cancel.
  double x_min = 0.0;
  double rel_precision = 1e-8;
};

class PrecisionLoss : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Builds the coefficient table. depth = 0 selects the smallest depth whose
/// first omitted coefficient is below 1e-20.
HDensitySpec make_h_density_spec(double a, int depth = 0, double rel_precision = 1e-8);

struct SeriesValue {
  double value = 0.0;
  /// first omitted term plus accumulated rounding
  double error_bound = 0.0;
};

/// h(x). Throws PrecisionLoss for x < spec.x_min.
double h_density(const HDensitySpec& spec, double x);
/// h(x) with its error bound; no fence.
SeriesValue h_density_unchecked(const HDensitySpec& spec, double x);

/// P(H > x) = prefactor * sum_n c_n exp(-a^-n x), the density series integrated
/// term by term. Accurate in absolute terms for every x >= 0.
double h_survival(const HDensitySpec& spec, double x);
double h_cdf(const HDensitySpec& spec, double x);

/// H truncated to sum_{k<depth} a^k E_k.
template <class Gen>
double sample_h(double a, int depth, Gen& gen) {
  double total = 0.0;
  double weight = 1.0;
  for (int k = 0; k < depth; ++k) {
    total += weight * standard_exponential(gen);
    weight *= a;
  }
  return total;
}

/// Depth for sample_h with a^depth / (1 - a) < 1e-12.
int default_sample_depth(double a);

enum class PartialSumMode { monte_carlo, exact_chain };

/// P(a^n sum_{k=1}^n G_k >= x) with the zero-based sojourns G_k = T_k - 1.
/// monte_carlo draws `replicas` sums from gen; exact_chain reads the tail from
/// the chain law via P(T_1+...+T_n > s) = P(L(s) <= n).
double partial_sum_tail(double a, int n, double x, PartialSumMode mode, Rng* gen = nullptr,
                        std::uint64_t replicas = 100000);

/// Tail at several x at once; exact_chain mode shares one chain run.
std::vector<double> partial_sum_tail(double a, int n, const std::vector<double>& xs, PartialSumMode mode,
                                     Rng* gen = nullptr, std::uint64_t replicas = 100000);

/// Limit law of L(b^{n+x}) - n, i.e. P(ceil(x - log_b H) <= m) = P(H >= a^{m-x}).
double limit_counter_cdf(const HDensitySpec& spec, double x, long m);

/// P(F(x) <= z) for F(x) = log_b(1/(aH)) - {x - log_b H}; period 1 in x.
double limit_distribution_cdf(const HDensitySpec& spec, double x, double z);
double limit_distribution_cdf(double a, double x, double z);

/// Kolmogorov distance between the exact law of L(t) - log_b t and the limit law
/// at phase log_b t - floor(log_b t).
double limit_ks_distance(const BackoffDistribution& dist, const HDensitySpec& spec);

/// Kolmogorov distance between the limit laws at two phases.
double limit_phase_ks_distance(const HDensitySpec& spec, double x1, double x2);

struct LaplacePair {
  double chain = 0.0;  ///< E exp(-lambda L(floor t)) from the exact chain
  double limit = 0.0;  ///< E exp(-lambda ceil(log_b(t/H))) from the law of H
};

LaplacePair laplace_compare(double a, double t, double lambda, double tail_cut = 1e-15);
/// Right side only.
double laplace_limit_side(const HDensitySpec& spec, double t, double lambda);

}  // namespace treeosc::ethernet

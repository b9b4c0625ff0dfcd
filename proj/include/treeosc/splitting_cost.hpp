#pragma once

// Expected cost of the binary splitting algorithm K(n): a group of n items is
// split by fair coin flips into two subgroups, recursively, until every group
// holds at most one item. R_n counts the steps, with R_0 = R_1 = 1.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string_view>
#include <vector>

#include "treeosc/numerics.hpp"

namespace treeosc::splitting {

using numerics::Tolerance;
using Rational = boost::multiprecision::cpp_rational;

enum class CostMethod { recurrence, series, integral, exact_rational };

std::string_view to_string(CostMethod method);
CostMethod parse_cost_method(std::string_view name);

/// E(R_n) for n = 0..n_max.
struct CostTable {
  std::vector<double> values;
  CostMethod method = CostMethod::recurrence;
  int n_max = 0;
};

struct ExactCostTable {
  std::vector<Rational> values;
  CostTable to_table() const;
};

/// Solves E(R_n) = 1 + 2 sum_k C(n,k) 2^-n E(R_k) with the k = n term moved to
/// the left side. Throws std::overflow_error naming the first n whose binomial
/// weights lose mass to underflow.
CostTable solve_recurrence(int n_max);

/// Same recurrence in exact rational arithmetic. n_max <= 64.
ExactCostTable solve_recurrence_exact(int n_max);

/// E(R_n) = 1 + 2 sum_{k>=0} 2^k P(Bin(n, 2^-k) >= 2), for n >= 2.
double mean_cost_series(std::uint64_t n, const Tolerance& tol = {});

/// E(R_n) from the de-Poissonized integral 4n int_0^1 2^{-{-log2 x}} (n-1)(1-x)^{n-2} dx - 1,
/// integrated exactly on each dyadic cell of x. n >= 2.
double mean_cost_integral(std::uint64_t n, const Tolerance& tol = {});

/// Cost from any of the methods; exact_rational is limited to n <= 64.
double mean_cost(std::uint64_t n, CostMethod method, const Tolerance& tol = {});

/// Poisson transform r(x) = sum_n E(R_n) e^-x x^n / n! as 1 + 2 sum_k 2^k P(t2 <= x / 2^k).
double poisson_transform_series(double x, const Tolerance& tol = {});

/// Poisson transform from 4x int_0^x 2^{-{log2 x - log2 y}} e^-y dy + 2(1+x)e^-x - 1.
double poisson_transform_integral(double x, const Tolerance& tol = {});

/// Direct Poisson-weighted sum of a cost table, sum_{n<=n_max} E(R_n) e^-x x^n/n!.
double poisson_weighted_sum(const CostTable& table, double x);

/// The period-1 fluctuation F(y) = 4 int_0^inf 2^{-{y - log2 x}} e^-x dx.
double periodic_f(double y, const Tolerance& tol = {});

/// 2 / ln 2, the mean of periodic_f over one period.
double periodic_f_mean();

/// One period of a fluctuation function sampled on a uniform grid.
struct PeriodicProfile {
  std::vector<double> sample_points;
  std::vector<double> sample_values;
  double analytic_mean = 0.0;
  double amplitude = 0.0;
  /// Periodic trapezoid mean of the samples.
  double sample_mean() const;
};

PeriodicProfile sample_periodic_f(int grid, const Tolerance& tol = {});

struct OscillationReport {
  int n_lo = 0;
  int n_hi = 0;
  /// |E(R_n) + 1 - n F(log2 n)| for n = n_lo..n_hi.
  std::vector<double> discrepancies;
  /// discrepancy / (n e^-n)
  std::vector<double> ratios;
  double worst_ratio = 0.0;
  int worst_n = 0;
  bool within(double constant, double slack) const;
};

/// Compares E(R_n) + 1 against n F(log2 n) on [n_lo, n_hi] within [2, 60].
OscillationReport verify_oscillation_bound(int n_lo, int n_hi);

}  // namespace treeosc::splitting

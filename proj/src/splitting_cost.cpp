#include "treeosc/splitting_cost.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace treeosc::splitting {

using numerics::CompensatedSum;
using numerics::erlang2_cdf;
using numerics::NonConvergence;
using numerics::QnMode;
using numerics::stable_qn;

std::string_view to_string(CostMethod method) {
  switch (method) {
    case CostMethod::recurrence: return "recurrence";
    case CostMethod::series: return "series";
    case CostMethod::integral: return "integral";
    case CostMethod::exact_rational: return "exact_rational";
  }
  return "unknown";
}

CostMethod parse_cost_method(std::string_view name) {
  if (name == "recurrence") return CostMethod::recurrence;
  if (name == "series") return CostMethod::series;
  if (name == "integral") return CostMethod::integral;
  if (name == "exact" || name == "exact_rational") return CostMethod::exact_rational;
  throw std::invalid_argument("unknown cost method: " + std::string(name));
}

CostTable ExactCostTable::to_table() const {
  CostTable table;
  table.method = CostMethod::exact_rational;
  table.n_max = static_cast<int>(values.size()) - 1;
  table.values.reserve(values.size());
  for (const auto& v : values) table.values.push_back(static_cast<double>(v));
  return table;
}

CostTable solve_recurrence(int n_max) {
  if (n_max < 0) throw std::invalid_argument("solve_recurrence requires n_max >= 0");
  CostTable table;
  table.method = CostMethod::recurrence;
  table.n_max = n_max;
  table.values.assign(static_cast<std::size_t>(n_max) + 1, 1.0);

  for (int n = 2; n <= n_max; ++n) {
    // C(n,k) 2^-n carried as mantissa * 2^exponent so the leading weights never
    // underflow before they are scaled back.
    double mantissa = 0.5;
    int exponent = 1 - n;
    CompensatedSum rhs;
    CompensatedSum mass;
    for (int k = 0; k < n; ++k) {
      const double w = std::ldexp(mantissa, exponent);
      rhs += w * table.values[static_cast<std::size_t>(k)];
      mass += w;
      int shift = 0;
      mantissa = std::frexp(mantissa * (static_cast<double>(n - k) / static_cast<double>(k + 1)), &shift);
      exponent += shift;
    }
    const double w_self = std::ldexp(1.0, -n);
    mass += w_self;
    if (std::abs(mass.value() - 1.0) > 1e-10) {
      throw std::overflow_error("binomial weights underflow at n = " + std::to_string(n));
    }
    table.values[static_cast<std::size_t>(n)] = (1.0 + 2.0 * rhs.value()) / (1.0 - 2.0 * w_self);
  }
  return table;
}

ExactCostTable solve_recurrence_exact(int n_max) {
  if (n_max < 0 || n_max > 64) throw std::invalid_argument("solve_recurrence_exact requires 0 <= n_max <= 64");
  using boost::multiprecision::cpp_int;
  ExactCostTable table;
  table.values.assign(static_cast<std::size_t>(n_max) + 1, Rational(1));
  for (int n = 2; n <= n_max; ++n) {
    cpp_int binom = 1;
    Rational weighted = 0;
    for (int k = 0; k < n; ++k) {
      weighted += Rational(binom) * table.values[static_cast<std::size_t>(k)];
      binom = binom * (n - k) / (k + 1);
    }
    const cpp_int two_n = cpp_int(1) << n;
    // E_n (1 - 2^{1-n}) = 1 + 2 weighted / 2^n
    const Rational rhs = Rational(1) + Rational(2) * weighted / Rational(two_n);
    const Rational self = Rational(two_n - 2) / Rational(two_n);
    table.values[static_cast<std::size_t>(n)] = rhs / self;
  }
  return table;
}

double mean_cost_series(std::uint64_t n, const Tolerance& tol) {
  tol.validate();
  if (n < 2) throw std::invalid_argument("mean_cost_series requires n >= 2");
  const double nd = static_cast<double>(n);
  // k = 0: P(Bin(n, 1) >= 2) = 1
  CompensatedSum acc;
  acc += 3.0;
  for (int k = 1; k <= tol.max_terms; ++k) {
    acc += 2.0 * std::ldexp(stable_qn(std::ldexp(1.0, -k), n, QnMode::pow_times_linear), k);
    // P(Bin(n,q) >= 2) <= C(n,2) q^2 bounds every later term by n(n-1) 2^-k'.
    const double tail = nd * (nd - 1.0) * std::ldexp(1.0, -k);
    if (tail <= tol.target(acc.value())) return acc.value();
  }
  throw NonConvergence("mean_cost_series: tail above tolerance after max_terms for n = " + std::to_string(n));
}

double mean_cost_integral(std::uint64_t n, const Tolerance& tol) {
  tol.validate();
  if (n < 2) throw std::invalid_argument("mean_cost_integral requires n >= 2");
  const double nd = static_cast<double>(n);
  const auto second_order_cdf = [n](double x) {
    return x >= 1.0 ? 1.0 : stable_qn(x, n, QnMode::pow_times_linear);
  };
  // Cell c covers x in (2^c, 2^{c+1}] with c = -(j+1); there 2^{-{-log2 x}} = 2^j x,
  // and 4n 2^j (n-1) x (1-x)^{n-2} has antiderivative 4 2^j P(U_(2),n <= x).
  numerics::DyadicIntegrand integrand;
  integrand.antiderivative = [&](int cell, double x) { return std::ldexp(4.0, -cell - 1) * second_order_cdf(x); };
  integrand.outside_mass_bound = [nd](int lo, int) { return 2.0 * nd * (nd - 1.0) * std::ldexp(1.0, lo + 1); };

  const double target = tol.target(2.8 * nd);
  int depth = 1;
  while (2.0 * nd * (nd - 1.0) * std::ldexp(1.0, -depth) > target && depth < tol.max_terms) ++depth;
  const auto result = numerics::dyadic_piecewise_integral(integrand, -depth - 1, -1, tol);
  return result.value - 1.0;
}

double mean_cost(std::uint64_t n, CostMethod method, const Tolerance& tol) {
  if (n < 2) return 1.0;
  switch (method) {
    case CostMethod::recurrence: return solve_recurrence(static_cast<int>(n)).values.back();
    case CostMethod::series: return mean_cost_series(n, tol);
    case CostMethod::integral: return mean_cost_integral(n, tol);
    case CostMethod::exact_rational:
      return static_cast<double>(solve_recurrence_exact(static_cast<int>(n)).values.back());
  }
  throw std::invalid_argument("unknown cost method");
}

double poisson_transform_series(double x, const Tolerance& tol) {
  tol.validate();
  if (!(x >= 0.0)) throw std::invalid_argument("poisson_transform_series requires x >= 0");
  if (x == 0.0) return 1.0;
  CompensatedSum acc;
  acc += 1.0;
  for (int k = 0; k < tol.max_terms; ++k) {
    acc += std::ldexp(erlang2_cdf(std::ldexp(x, -k)), k + 1);
    // P(t2 <= y) <= y^2 / 2
    const double tail = x * x * std::ldexp(1.0, -k);
    if (tail <= tol.target(acc.value())) return acc.value();
  }
  throw NonConvergence("poisson_transform_series: tail above tolerance at x = " + std::to_string(x));
}

double poisson_transform_integral(double x, const Tolerance& tol) {
  tol.validate();
  if (!(x >= 0.0)) throw std::invalid_argument("poisson_transform_integral requires x >= 0");
  if (x == 0.0) return 1.0;
  // Cells y in (x 2^{-m-1}, x 2^{-m}], m >= 0, indexed c = -m-1 with scale x; the
  // integrand there is 4 2^m y e^-y.
  numerics::DyadicIntegrand integrand;
  integrand.scale = x;
  integrand.antiderivative = [](int cell, double y) { return std::ldexp(4.0, -cell - 1) * erlang2_cdf(y); };
  integrand.outside_mass_bound = [x](int lo, int) { return 2.0 * x * x * std::ldexp(1.0, lo + 1); };
  const double target = tol.target(3.0 * x + 1.0);
  int depth = 0;
  while (2.0 * x * x * std::ldexp(1.0, -depth) > target && depth < tol.max_terms) ++depth;
  const auto result = numerics::dyadic_piecewise_integral(integrand, -depth - 1, -1, tol);
  return result.value + 2.0 * (1.0 + x) * std::exp(-x) - 1.0;
}

double poisson_weighted_sum(const CostTable& table, double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("poisson_weighted_sum requires x >= 0");
  CompensatedSum acc;
  double log_weight = -x;  // log(e^-x x^n / n!)
  for (std::size_t n = 0; n < table.values.size(); ++n) {
    if (n > 0) log_weight += x > 0.0 ? std::log(x) - std::log(static_cast<double>(n)) : -INFINITY;
    acc += table.values[n] * std::exp(log_weight);
  }
  return acc.value();
}

double periodic_f(double y, const Tolerance& tol) {
  tol.validate();
  if (!std::isfinite(y)) throw std::invalid_argument("periodic_f requires finite y");
  const double phase = y - std::floor(y);
  const double scale = std::exp2(phase);
  // Cells x in (2^{phase-m-1}, 2^{phase-m}], indexed c = -m-1 with scale 2^phase;
  // there 2^{-{phase - log2 x}} = 2^{m-phase} x.
  numerics::DyadicIntegrand integrand;
  integrand.scale = scale;
  integrand.antiderivative = [scale](int cell, double x) {
    return std::ldexp(4.0, -cell - 1) / scale * erlang2_cdf(x);
  };
  integrand.outside_mass_bound = [scale](int lo, int hi) {
    const double near_zero = 2.0 * scale * std::ldexp(1.0, lo + 1);
    const double far = 4.0 * std::exp(-std::ldexp(scale, hi + 1));
    return near_zero + far;
  };
  const double target = tol.target(2.885);
  int depth = 0;
  while (2.0 * scale * std::ldexp(1.0, -depth) > target && depth < tol.max_terms) ++depth;
  // 2^11 > 745, past which e^-x underflows.
  const auto result = numerics::dyadic_piecewise_integral(integrand, -depth - 1, 10, tol);
  return result.value;
}

double periodic_f_mean() { return 2.0 / std::numbers::ln2; }

double PeriodicProfile::sample_mean() const {
  CompensatedSum acc;
  for (double v : sample_values) acc += v;
  return sample_values.empty() ? 0.0 : acc.value() / static_cast<double>(sample_values.size());
}

PeriodicProfile sample_periodic_f(int grid, const Tolerance& tol) {
  if (grid < 2) throw std::invalid_argument("periodic profile needs grid >= 2");
  PeriodicProfile profile;
  profile.analytic_mean = periodic_f_mean();
  for (int i = 0; i < grid; ++i) {
    const double y = static_cast<double>(i) / grid;
    profile.sample_points.push_back(y);
    profile.sample_values.push_back(periodic_f(y, tol));
  }
  const auto [lo, hi] = std::minmax_element(profile.sample_values.begin(), profile.sample_values.end());
  profile.amplitude = *hi - *lo;
  return profile;
}

bool OscillationReport::within(double constant, double slack) const {
  for (std::size_t i = 0; i < discrepancies.size(); ++i) {
    const double n = static_cast<double>(n_lo) + static_cast<double>(i);
    if (discrepancies[i] > constant * n * std::exp(-n) + slack) return false;
  }
  return true;
}

OscillationReport verify_oscillation_bound(int n_lo, int n_hi) {
  if (n_lo < 2 || n_hi > 60 || n_lo > n_hi) {
    throw std::invalid_argument("verify_oscillation_bound requires 2 <= n_lo <= n_hi <= 60");
  }
  const CostTable exact = solve_recurrence_exact(n_hi).to_table();
  OscillationReport report;
  report.n_lo = n_lo;
  report.n_hi = n_hi;
  for (int n = n_lo; n <= n_hi; ++n) {
    const double nd = n;
    const double gap =
        std::abs(exact.values[static_cast<std::size_t>(n)] + 1.0 - nd * periodic_f(std::log2(nd)));
    const double ratio = gap / (nd * std::exp(-nd));
    report.discrepancies.push_back(gap);
    report.ratios.push_back(ratio);
    if (ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_n = n;
    }
  }
  return report;
}

}  // namespace treeosc::splitting

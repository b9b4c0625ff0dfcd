#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace treeosc::numerics {

/// Error targets shared by every truncated series and piecewise integral.
struct Tolerance {
  double abs_tol = 1e-13;
  double rel_tol = 1e-14;
  int max_terms = 256;

  void validate() const;
  /// Truncation threshold for a partial result of magnitude |value|.
  double target(double value) const;
};

struct SeriesResult {
  double value = 0.0;
  int terms_used = 0;
  double tail_bound = 0.0;
};

/// Raised when a truncated series or integral cannot certify its tail.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double term) {
    const double t = sum_ + term;
    if (std::abs(sum_) >= std::abs(term)) {
      correction_ += (sum_ - t) + term;
    } else {
      correction_ += (term - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

double compensated_sum(std::span<const double> terms);

enum class QnMode {
  pow,               ///< (1-q)^n
  one_minus_pow,     ///< 1-(1-q)^n
  pow_times_linear,  ///< 1-(1-q)^n - n q (1-q)^(n-1), i.e. P(Bin(n,q) >= 2)
};

/// Cancellation-free powers of (1-q). Throws std::domain_error unless 0 < q < 1.
double stable_qn(double q, std::uint64_t n, QnMode mode);

/// P(t2 <= y) for t2 the sum of two unit exponentials: 1 - (1+y) e^{-y}.
/// Accurate to a few ulps relative for all y >= 0.
double erlang2_cdf(double y);

/// A function whose antiderivative is known in closed form on every cell
/// (scale 2^j, scale 2^(j+1)].
struct DyadicIntegrand {
  /// Antiderivative valid on cell j, evaluated at x.
  std::function<double(int cell, double x)> antiderivative;
  double scale = 1.0;
  /// Bound on the absolute mass outside cells [lo, hi]. Empty means zero.
  std::function<double(int lo, int hi)> outside_mass_bound;
};

/// Sums exact cell integrals over cells lo..hi. Throws NonConvergence when the
/// outside mass bound exceeds the tolerance or hi-lo+1 exceeds max_terms.
SeriesResult dyadic_piecewise_integral(const DyadicIntegrand& f, int lo_exponent,
                                       int hi_exponent, const Tolerance& tol);

/// Adaptive Gauss-Kronrod on a finite interval where f is smooth.
/// Returns the integral; error_estimate receives the quadrature error estimate.
/// The estimate never drops below about 50 eps times the L1 norm, so rel_tol
/// much under 1e-13 forces bisection to the depth limit.
double integrate_smooth(const std::function<double(double)>& f, double lo, double hi,
                        double rel_tol = 1e-12, double* error_estimate = nullptr);

}  // namespace treeosc::numerics

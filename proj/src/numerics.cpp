#include "treeosc/numerics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace treeosc::numerics {

void Tolerance::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_terms < 1) {
    throw std::invalid_argument("tolerance requires abs_tol > 0, rel_tol > 0, max_terms >= 1");
  }
}

double Tolerance::target(double value) const { return std::max(abs_tol, rel_tol * std::abs(value)); }

double compensated_sum(std::span<const double> terms) {
  CompensatedSum acc;
  for (double t : terms) acc += t;
  return acc.value();
}

namespace {

// P(Bin(n, q) >= 2) summed from its m = 2 term; valid when n q is small so the
// terms decay geometrically.
double binomial_tail_from_two(double q, std::uint64_t n) {
  if (n < 2) return 0.0;
  const double nd = static_cast<double>(n);
  const double log_keep = std::log1p(-q);
  double term = 0.5 * nd * (nd - 1.0) * q * q * std::exp((nd - 2.0) * log_keep);
  const double odds = q / (1.0 - q);
  CompensatedSum acc;
  for (std::uint64_t m = 2; m <= n && term != 0.0; ++m) {
    acc += term;
    if (term < 1e-18 * acc.value()) break;
    term *= (nd - static_cast<double>(m)) / static_cast<double>(m + 1) * odds;
  }
  return acc.value();
}

}  // namespace

double stable_qn(double q, std::uint64_t n, QnMode mode) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("stable_qn requires 0 < q < 1");
  const double nd = static_cast<double>(n);
  const double log_keep = std::log1p(-q);
  switch (mode) {
    case QnMode::pow:
      return std::exp(nd * log_keep);
    case QnMode::one_minus_pow:
      return -std::expm1(nd * log_keep);
    case QnMode::pow_times_linear:
      if (n < 2) return 0.0;
      if (nd * q < 0.5) return binomial_tail_from_two(q, n);
      return -std::expm1(nd * log_keep) - nd * q * std::exp((nd - 1.0) * log_keep);
  }
  throw std::invalid_argument("unknown QnMode");
}

double erlang2_cdf(double y) {
  if (!(y > 0.0)) return 0.0;
  if (y >= 0.5) return -std::expm1(-y) - y * std::exp(-y);
  // sum_{m>=2} (-1)^m y^m (m-1)/m!
  double term = 0.5 * y * y;
  CompensatedSum acc;
  for (int m = 2; m < 40; ++m) {
    acc += term;
    if (std::abs(term) < 1e-18 * acc.value()) break;
    term *= -y * m / (static_cast<double>(m - 1) * (m + 1));
  }
  return acc.value();
}

SeriesResult dyadic_piecewise_integral(const DyadicIntegrand& f, int lo_exponent, int hi_exponent,
                                       const Tolerance& tol) {
  tol.validate();
  if (!f.antiderivative) throw std::invalid_argument("dyadic integrand has no antiderivative");
  if (!(f.scale > 0.0)) throw std::invalid_argument("dyadic integrand scale must be positive");
  SeriesResult out;
  if (hi_exponent < lo_exponent) return out;
  const long cells = static_cast<long>(hi_exponent) - lo_exponent + 1;
  if (cells > tol.max_terms) {
    throw NonConvergence("dyadic integral needs " + std::to_string(cells) +
                         " cells, above max_terms " + std::to_string(tol.max_terms));
  }
  CompensatedSum acc;
  for (int j = lo_exponent; j <= hi_exponent; ++j) {
    const double left = std::ldexp(f.scale, j);
    const double right = std::ldexp(f.scale, j + 1);
    acc += f.antiderivative(j, right) - f.antiderivative(j, left);
  }
  out.value = acc.value();
  out.terms_used = static_cast<int>(cells);
  out.tail_bound = f.outside_mass_bound ? f.outside_mass_bound(lo_exponent, hi_exponent) : 0.0;
  if (!(out.tail_bound <= tol.target(out.value))) {
    throw NonConvergence("dyadic integral tail bound " + std::to_string(out.tail_bound) +
                         " exceeds tolerance over cells [" + std::to_string(lo_exponent) + ", " +
                         std::to_string(hi_exponent) + "]");
  }
  return out;
}

double integrate_smooth(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                        double* error_estimate) {
  if (!(hi > lo)) {
    if (error_estimate) *error_estimate = 0.0;
    return 0.0;
  }
  // Map to [-1, 1] first: the library compares an unscaled error estimate with
  // a scaled tolerance, which on short intervals bisects to the depth limit.
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const auto mapped = [&](double t) { return f(mid + half * t); };
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(mapped, -1.0, 1.0, 15, rel_tol, &err);
  if (error_estimate) *error_estimate = half * err;
  return half * value;
}

}  // namespace treeosc::numerics

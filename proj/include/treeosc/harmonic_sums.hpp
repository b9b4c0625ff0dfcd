#pragma once

// Dyadic sums G(x) = sum_{k>=1} g(beta^k x) and general harmonic sums
// G(x) = sum_{k>=1} lambda_k g(mu_k x), evaluated directly and through their
// integral representations against g'.

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "treeosc/numerics.hpp"

namespace treeosc::harmonic {

using numerics::Tolerance;

/// g together with its derivative. Dyadic operations require g(0) = 0.
struct Integrand {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  bool zero_at_origin = true;
  /// |g(u)| <= origin_slope * u and |g'(u)| <= origin_slope for u <= origin_radius.
  /// NaN means no certificate.
  double origin_slope = std::numeric_limits<double>::quiet_NaN();
  double origin_radius = 0.0;
  /// Bound on int_u^inf (|g'(v)| + |g(v)|/v) dv; empty means none.
  std::function<double(double)> tail_mass;
  /// Points where g' is not smooth.
  std::vector<double> kinks;
};

/// The test corpus: u e^-u, u^2 e^-u, e^-u - e^-2u, min(u, 1) e^-u.
Integrand u_exp();
Integrand u2_exp();
Integrand exp_difference();
Integrand min_exp();
Integrand zero_integrand();
/// 2 P(t2 <= u), the Erlang-2 distribution function doubled.
Integrand doubled_erlang2_cdf();
std::vector<Integrand> integrand_corpus();
/// Looks up a corpus member by name (u_exp, u2_exp, exp_difference, min_exp, zero).
Integrand integrand_by_name(const std::string& name);

struct HarmonicSumSpec {
  Integrand integrand;
  /// lambda_k for k >= 1
  std::function<double(std::uint64_t)> weight;
  /// mu_k for k >= 1, positive and non-increasing
  std::function<double(std::uint64_t)> scale;
  /// 0 for an infinite sequence, else the number of terms.
  std::uint64_t terms = 0;
  /// Bound on sum_{k>K} |lambda_k g(mu_k x)| as a function of (K, x); required
  /// for infinite sequences.
  std::function<double(std::uint64_t, double)> tail_bound;
  Tolerance tol{};
};

/// sum_{k>=1} g(beta^k x). Throws NonConvergence without a tail certificate.
double dyadic_sum_direct(const Integrand& g, double x, double beta = 0.5, const Tolerance& tol = {});

/// Right side of G(x) = F(log_b x) + int_x^inf {log_b(x/u)} g'(u) du - (1/ln b) int_x^inf g(u)/u du
/// with b = 1/beta.
double dyadic_sum_representation(const Integrand& g, double x, const Tolerance& tol = {}, double beta = 0.5);

/// F(y) = (1/ln b) int_0^inf g(u)/u du - int_0^inf {y - log_b u} g'(u) du, period 1.
double dyadic_periodic_f(const Integrand& g, double y, const Tolerance& tol = {}, double beta = 0.5);

/// int_0^inf g(u)/u du (the Mellin transform of g at 0).
double mellin_at_zero(const Integrand& g, const Tolerance& tol = {});

/// int_x^inf (|g'(u)| + |g(u)| / (u ln b)) du, by quadrature.
double representation_tail_size(const Integrand& g, double x, double beta = 0.5, const Tolerance& tol = {});

/// Result of scanning int |log u| |g'(u)| du on a logarithmic grid.
struct IntegrabilityCheck {
  bool looks_finite = true;
  /// partial integrals over [2^-j, 2^j] for growing j
  std::vector<double> partials;
  std::string message;
};

IntegrabilityCheck check_log_integrability(const Integrand& g);

double harmonic_sum_direct(const HarmonicSumSpec& spec, double x);

/// int_0^inf Lambda(tau(u/x)) g'(u) du with Lambda(n) = sum_{k<=n} lambda_k and
/// tau(y) = sup{k : mu_k > y}, split at u = mu_k x.
double harmonic_sum_representation(const HarmonicSumSpec& spec, double x);

/// tau(y) over a materialized non-increasing scale sequence, by binary search.
std::uint64_t tau(const std::vector<double>& scales, double y);

/// Lambda over a materialized weight sequence; Lambda(0) = 0.
double cumulative_weight(const std::vector<double>& weights, std::uint64_t n);

}  // namespace treeosc::harmonic

#include "treeosc/harmonic_sums.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <stdexcept>

namespace treeosc::harmonic {

using numerics::CompensatedSum;
using numerics::NonConvergence;

Integrand u_exp() {
  Integrand g;
  g.name = "u_exp";
  g.value = [](double u) { return u * std::exp(-u); };
  g.derivative = [](double u) { return (1.0 - u) * std::exp(-u); };
  g.origin_slope = 1.0;
  g.origin_radius = INFINITY;
  g.tail_mass = [](double u) { return (u + 3.0) * std::exp(-u); };
  return g;
}

Integrand u2_exp() {
  Integrand g;
  g.name = "u2_exp";
  g.value = [](double u) { return u * u * std::exp(-u); };
  g.derivative = [](double u) { return (2.0 * u - u * u) * std::exp(-u); };
  g.origin_slope = 1.0;
  g.origin_radius = 0.5;
  g.tail_mass = [](double u) { return (u * u + 5.0 * u + 5.0) * std::exp(-u); };
  return g;
}

Integrand exp_difference() {
  Integrand g;
  g.name = "exp_difference";
  g.value = [](double u) { return -std::expm1(-u) * std::exp(-u); };
  g.derivative = [](double u) { return 2.0 * std::exp(-2.0 * u) - std::exp(-u); };
  g.origin_slope = 1.0;
  g.origin_radius = INFINITY;
  g.tail_mass = [](double u) { return 2.0 * std::exp(-u) + std::exp(-2.0 * u); };
  return g;
}

Integrand min_exp() {
  Integrand g;
  g.name = "min_exp";
  g.value = [](double u) { return std::min(u, 1.0) * std::exp(-u); };
  g.derivative = [](double u) { return (u < 1.0 ? 1.0 - u : -1.0) * std::exp(-u); };
  g.origin_slope = 1.0;
  g.origin_radius = INFINITY;
  g.tail_mass = [](double u) { return 2.0 * std::exp(-u); };
  g.kinks = {1.0};
  return g;
}

Integrand zero_integrand() {
  Integrand g;
  g.name = "zero";
  g.value = [](double) { return 0.0; };
  g.derivative = [](double) { return 0.0; };
  g.origin_slope = 0.0;
  g.origin_radius = INFINITY;
  g.tail_mass = [](double) { return 0.0; };
  return g;
}

Integrand doubled_erlang2_cdf() {
  Integrand g;
  g.name = "doubled_erlang2_cdf";
  g.value = [](double u) { return 2.0 * numerics::erlang2_cdf(u); };
  g.derivative = [](double u) { return 2.0 * u * std::exp(-u); };
  g.origin_slope = 1.0;
  g.origin_radius = 0.5;
  return g;
}

std::vector<Integrand> integrand_corpus() { return {u_exp(), u2_exp(), exp_difference(), min_exp()}; }

Integrand integrand_by_name(const std::string& name) {
  for (auto& g : integrand_corpus()) {
    if (g.name == name) return g;
  }
  if (name == "zero") return zero_integrand();
  throw std::invalid_argument("unknown integrand: " + name);
}

namespace {

void require_dyadic(const Integrand& g, double beta) {
  if (!g.value || !g.derivative) throw std::invalid_argument("integrand needs value and derivative");
  if (!g.zero_at_origin) throw std::invalid_argument("dyadic sums require g(0) = 0");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
}

// Integral of f over (lo, hi], split at the integrand's kinks.
double integrate_piece(const Integrand& g, const std::function<double(double)>& f, double lo, double hi) {
  CompensatedSum acc;
  double left = lo;
  for (double k : g.kinks) {
    if (k > left && k < hi) {
      acc += numerics::integrate_smooth(f, left, k);
      left = k;
    }
  }
  acc += numerics::integrate_smooth(f, left, hi);
  return acc.value();
}

// Integrates f(u, m) over cells m <= m_max, cell m being (anchor b^{-m-1}, anchor b^{-m}].
// weight bounds |f| by weight * (|g'(u)| + |g(u)|/u); it drives the truncation of
// both ends from the integrand's certificates.
double integrate_cells(const Integrand& g, double anchor, double base,
                       const std::function<double(double, long)>& f, long m_max, double weight,
                       const Tolerance& tol) {
  const auto cell_lo = [&](long m) { return anchor * std::pow(base, static_cast<double>(-m - 1)); };
  const auto cell_hi = [&](long m) { return anchor * std::pow(base, static_cast<double>(-m)); };
  const auto cell = [&](long m) {
    return integrate_piece(g, [&f, m](double u) { return f(u, m); }, cell_lo(m), cell_hi(m));
  };
  double max_kink = 0.0;
  for (double k : g.kinks) max_kink = std::max(max_kink, k);

  CompensatedSum acc;
  // Towards the origin.
  if (m_max == LONG_MAX) {
    bool certified = false;
    for (long m = 0; m < tol.max_terms; ++m) {
      acc += cell(m);
      const double rest = cell_lo(m);
      if (!std::isnan(g.origin_slope) && rest <= g.origin_radius &&
          weight * 2.0 * g.origin_slope * rest <= 0.01 * tol.target(acc.value())) {
        certified = true;
        break;
      }
    }
    if (!certified) throw NonConvergence("integral near the origin not certified for " + g.name);
  }
  // Towards infinity.
  const long first = std::min<long>(m_max, -1);
  int quiet = 0;
  bool certified = false;
  for (long m = first; m > first - tol.max_terms; --m) {
    const double piece = cell(m);
    acc += piece;
    const double reach = cell_hi(m);
    if (g.tail_mass) {
      if (weight * g.tail_mass(reach) <= 0.01 * tol.target(acc.value())) {
        certified = true;
        break;
      }
    } else {
      quiet = std::abs(piece) <= 1e-3 * tol.target(acc.value()) && reach > max_kink ? quiet + 1 : 0;
      if (quiet >= 8) {
        certified = true;
        break;
      }
    }
  }
  if (!certified) throw NonConvergence("integral towards infinity not certified for " + g.name);
  return acc.value();
}

}  // namespace

double harmonic_sum_direct(const HarmonicSumSpec& spec, double x) {
  spec.tol.validate();
  if (!(x > 0.0)) throw std::invalid_argument("harmonic sums require x > 0");
  if (!spec.weight || !spec.scale || !spec.integrand.value) throw std::invalid_argument("incomplete harmonic sum spec");
  if (spec.terms == 0 && !spec.tail_bound) throw NonConvergence("infinite harmonic sum without a tail certificate");
  const auto& g = spec.integrand.value;
  CompensatedSum acc;
  for (std::uint64_t k = 1;; ++k) {
    if (spec.terms != 0 && k > spec.terms) return acc.value();
    acc += spec.weight(k) * g(spec.scale(k) * x);
    if (spec.terms == 0 && spec.tail_bound(k, x) <= spec.tol.target(acc.value())) return acc.value();
    if (k >= static_cast<std::uint64_t>(spec.tol.max_terms)) {
      throw NonConvergence("harmonic sum tail above tolerance after " + std::to_string(k) + " terms");
    }
  }
}

double dyadic_sum_direct(const Integrand& g, double x, double beta, const Tolerance& tol) {
  require_dyadic(g, beta);
  HarmonicSumSpec spec;
  spec.integrand = g;
  spec.weight = [](std::uint64_t) { return 1.0; };
  spec.scale = [beta](std::uint64_t k) { return std::pow(beta, static_cast<double>(k)); };
  spec.tol = tol;
  if (!std::isnan(g.origin_slope)) {
    const double slope = g.origin_slope;
    const double radius = g.origin_radius;
    spec.tail_bound = [=](std::uint64_t k, double at) {
      const double next = std::pow(beta, static_cast<double>(k + 1)) * at;
      return next <= radius ? slope * next / (1.0 - beta) : INFINITY;
    };
  }
  return harmonic_sum_direct(spec, x);
}

double mellin_at_zero(const Integrand& g, const Tolerance& tol) {
  tol.validate();
  return integrate_cells(g, 1.0, 2.0, [&g](double u, long) { return g.value(u) / u; }, LONG_MAX, 1.0, tol);
}

double dyadic_periodic_f(const Integrand& g, double y, const Tolerance& tol, double beta) {
  require_dyadic(g, beta);
  tol.validate();
  if (!std::isfinite(y)) throw std::invalid_argument("dyadic_periodic_f requires finite y");
  const double base = 1.0 / beta;
  const double log_base = std::log(base);
  const double phase = y - std::floor(y);
  const double anchor = std::pow(base, phase);
  const double fractional = integrate_cells(
      g, anchor, base,
      [&](double u, long m) { return (std::log(anchor / u) / log_base - static_cast<double>(m)) * g.derivative(u); },
      LONG_MAX, 1.0, tol);
  return mellin_at_zero(g, tol) / log_base - fractional;
}

double dyadic_sum_representation(const Integrand& g, double x, const Tolerance& tol, double beta) {
  require_dyadic(g, beta);
  tol.validate();
  if (!(x > 0.0)) throw std::invalid_argument("dyadic sums require x > 0");
  const double base = 1.0 / beta;
  const double log_base = std::log(base);
  // Cells m <= -1 anchored at x cover (x, inf); there {log_b(x/u)} = log_b(x/u) - m.
  const double fractional_tail = integrate_cells(
      g, x, base,
      [&](double u, long m) { return (std::log(x / u) / log_base - static_cast<double>(m)) * g.derivative(u); }, -1,
      1.0, tol);
  const double mellin_tail =
      integrate_cells(g, x, base, [&g](double u, long) { return g.value(u) / u; }, -1, 1.0, tol);
  return dyadic_periodic_f(g, std::log(x) / log_base, tol, beta) + fractional_tail - mellin_tail / log_base;
}

double representation_tail_size(const Integrand& g, double x, double beta, const Tolerance& tol) {
  require_dyadic(g, beta);
  const double base = 1.0 / beta;
  const double log_base = std::log(base);
  return integrate_cells(
      g, x, base,
      [&](double u, long) { return std::abs(g.derivative(u)) + std::abs(g.value(u)) / (u * log_base); }, -1,
      std::max(1.0, 1.0 / log_base), tol);
}

IntegrabilityCheck check_log_integrability(const Integrand& g) {
  IntegrabilityCheck check;
  const auto f = [&g](double u) { return std::abs(std::log(u)) * std::abs(g.derivative(u)); };
  CompensatedSum acc;
  double previous_increment = INFINITY;
  int growing = 0;
  for (int j = 0; j < 60; ++j) {
    const double inner = integrate_piece(g, f, std::ldexp(1.0, -j - 1), std::ldexp(1.0, -j));
    const double outer = integrate_piece(g, f, std::ldexp(1.0, j), std::ldexp(1.0, j + 1));
    const double increment = inner + outer;
    acc += increment;
    check.partials.push_back(acc.value());
    growing = increment > 0.9 * previous_increment && increment > 1e-12 * acc.value() ? growing + 1 : 0;
    previous_increment = increment;
  }
  if (growing >= 8 || !std::isfinite(acc.value())) {
    check.looks_finite = false;
    check.message = "int |log u| |g'(u)| du appears to diverge for " + g.name;
  }
  return check;
}

std::uint64_t tau(const std::vector<double>& scales, double y) {
  const auto it = std::partition_point(scales.begin(), scales.end(), [y](double mu) { return mu > y; });
  return static_cast<std::uint64_t>(it - scales.begin());
}

double cumulative_weight(const std::vector<double>& weights, std::uint64_t n) {
  CompensatedSum acc;
  for (std::uint64_t k = 0; k < n && k < weights.size(); ++k) acc += weights[k];
  return acc.value();
}

double harmonic_sum_representation(const HarmonicSumSpec& spec, double x) {
  spec.tol.validate();
  if (!(x > 0.0)) throw std::invalid_argument("harmonic sums require x > 0");
  if (!spec.weight || !spec.scale || !spec.integrand.derivative) {
    throw std::invalid_argument("incomplete harmonic sum spec");
  }
  if (spec.terms == 0 && !spec.tail_bound) throw NonConvergence("infinite harmonic sum without a tail certificate");
  const Integrand& g = spec.integrand;

  // Materialize mu_1..mu_K (and mu_{K+1} for infinite sequences).
  std::vector<double> scales;
  std::vector<double> weights;
  for (std::uint64_t k = 1;; ++k) {
    if (spec.terms != 0 && k > spec.terms) break;
    if (k > static_cast<std::uint64_t>(spec.tol.max_terms)) {
      throw NonConvergence("harmonic representation needs more than max_terms breakpoints");
    }
    const double mu = spec.scale(k);
    if (!(mu > 0.0) || (!scales.empty() && mu > scales.back())) {
      throw std::invalid_argument("harmonic scales must be positive and non-increasing");
    }
    scales.push_back(mu);
    weights.push_back(spec.weight(k));
    if (spec.terms == 0 && spec.tail_bound(k, x) <= spec.tol.abs_tol) break;
  }
  const std::size_t count = scales.size();
  const auto derivative = [&g](double u) { return g.derivative(u); };

  // On (mu_{k+1} x, mu_k x] the step function Lambda(tau(u/x)) equals Lambda(k).
  CompensatedSum acc;
  CompensatedSum lambda;
  for (std::size_t i = 0; i < count; ++i) {
    lambda += weights[i];
    const double hi = scales[i] * x;
    const double lo = i + 1 < count ? scales[i + 1] * x : (spec.terms != 0 ? 0.0 : spec.scale(count + 1) * x);
    if (lambda.value() != 0.0 && hi > lo) acc += lambda.value() * integrate_piece(g, derivative, lo, hi);
  }
  if (spec.terms == 0 && lambda.value() != 0.0) {
    // Below mu_{K+1} x the step function is Lambda(K) plus weights beyond K, whose
    // contribution sum_{j>K} lambda_j g(mu_j x) is bounded by the tail certificate.
    const double reach = spec.scale(count + 1) * x;
    acc += lambda.value() * integrate_piece(g, derivative, 0.0, reach);
  }
  return acc.value();
}

}  // namespace treeosc::harmonic

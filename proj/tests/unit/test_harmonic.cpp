#include <doctest.h>

#include <cmath>
#include <vector>

#include "treeosc/harmonic_sums.hpp"
#include "treeosc/splitting_cost.hpp"

using namespace treeosc::harmonic;
using treeosc::numerics::NonConvergence;

namespace {

// nsum of g(x 2^-k) at 60 digits
struct DirectCase {
  const char* name;
  double x;
  double value;
};

const DirectCase kDirect[] = {
    {"u_exp", 0.5, 0.42494081203138194513},          {"u_exp", 1, 0.72820614188769865694},
    {"u_exp", 10, 1.4422271699743665621},            {"u_exp", 100, 1.442697954824990295},
    {"u2_exp", 0.5, 0.067401354960851417998},        {"u2_exp", 1, 0.2190340198890097739},
    {"u2_exp", 10, 1.4381718910920342167},           {"u2_exp", 100, 1.4425714170704042274},
    {"exp_difference", 0.5, 0.3934693402873665764},  {"exp_difference", 1, 0.6321205588285576784},
    {"exp_difference", 10, 0.99995460007023751515},  {"exp_difference", 100, 1.0},
    {"min_exp", 0.5, 0.42494081203138194513},        {"min_exp", 1, 0.72820614188769865694},
    {"min_exp", 10, 1.2205216848271289759},          {"min_exp", 100, 1.221247824542771977},
};

HarmonicSumSpec dyadic_spec(const Integrand& g) {
  HarmonicSumSpec spec;
  spec.integrand = g;
  spec.weight = [](std::uint64_t) { return 1.0; };
  spec.scale = [](std::uint64_t k) { return std::ldexp(1.0, -static_cast<int>(k)); };
  spec.tail_bound = [](std::uint64_t k, double x) { return x * std::ldexp(1.0, -static_cast<int>(k)); };
  return spec;
}

}  // namespace

TEST_SUITE("harmonic") {

TEST_CASE("corpus derivatives integrate back to the values") {
  for (const auto& g : integrand_corpus()) {
    CAPTURE(g.name);
    for (double x : {0.3, 1.0, 2.5, 7.0}) {
      std::vector<double> cuts{0.0};
      for (double k : g.kinks) {
        if (k < x) cuts.push_back(k);
      }
      cuts.push_back(x);
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total += treeosc::numerics::integrate_smooth(g.derivative, cuts[i], cuts[i + 1]);
      }
      CHECK(total == doctest::Approx(g.value(x)).epsilon(1e-13));
    }
    CHECK(g.value(0.0) == 0.0);
  }
}

TEST_CASE("direct sums against high-precision values") {
  for (const auto& c : kDirect) {
    CAPTURE(c.name);
    CAPTURE(c.x);
    CHECK(dyadic_sum_direct(integrand_by_name(c.name), c.x) == doctest::Approx(c.value).epsilon(2e-13));
  }
  CHECK(dyadic_sum_direct(zero_integrand(), 3.0) == 0.0);
}

TEST_CASE("representation against high-precision values") {
  for (const auto& c : kDirect) {
    CAPTURE(c.name);
    CAPTURE(c.x);
    CHECK(dyadic_sum_representation(integrand_by_name(c.name), c.x) == doctest::Approx(c.value).epsilon(1e-12));
  }
  CHECK(dyadic_sum_representation(zero_integrand(), 3.0) == 0.0);
}

TEST_CASE("partial geometric sum for g(u) = u") {
  Integrand g;
  g.name = "identity";
  g.value = [](double u) { return u; };
  g.derivative = [](double) { return 1.0; };
  HarmonicSumSpec spec;
  spec.integrand = g;
  spec.weight = [](std::uint64_t) { return 1.0; };
  spec.scale = [](std::uint64_t k) { return std::pow(0.3, static_cast<double>(k)); };
  spec.terms = 12;
  const double x = 5.0;
  CHECK(harmonic_sum_direct(spec, x) == doctest::Approx(x * 0.3 * (1 - std::pow(0.3, 12)) / 0.7).epsilon(1e-15));
}

TEST_CASE("dyadic sums need a tail certificate and g(0) = 0") {
  Integrand g = u_exp();
  g.origin_slope = std::nan("");
  CHECK_THROWS_AS(dyadic_sum_direct(g, 1.0), NonConvergence);
  Integrand shifted = u_exp();
  shifted.zero_at_origin = false;
  CHECK_THROWS_AS(dyadic_sum_direct(shifted, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dyadic_sum_direct(u_exp(), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(dyadic_sum_direct(u_exp(), 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(integrand_by_name("sinc"), std::invalid_argument);
}

TEST_CASE("other ratios beta") {
  // sum_k 3^-k e^{-3^-k} at 60 digits
  CHECK(dyadic_sum_direct(u_exp(), 1.0, 1.0 / 3.0) == doctest::Approx(0.39230877164495420904).epsilon(1e-13));
  for (double x : {0.7, 4.0, 30.0}) {
    CAPTURE(x);
    CHECK(dyadic_sum_representation(u_exp(), x, {}, 1.0 / 3.0) ==
          doctest::Approx(dyadic_sum_direct(u_exp(), x, 1.0 / 3.0)).epsilon(1e-11));
  }
}

TEST_CASE("periodic function") {
  const auto g = u_exp();
  CHECK(mellin_at_zero(g) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(mellin_at_zero(exp_difference()) == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  for (double y : {0.0, 0.25, 0.625}) {
    CAPTURE(y);
    CHECK(dyadic_periodic_f(g, y + 1.0) == dyadic_periodic_f(g, y));
    CHECK(dyadic_periodic_f(g, y - 2.0) == dyadic_periodic_f(g, y));
  }
  double total = 0.0;
  for (int i = 0; i < 32; ++i) total += dyadic_periodic_f(g, i / 32.0);
  CHECK(total / 32 == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-10));
  CHECK(dyadic_periodic_f(zero_integrand(), 0.4) == 0.0);
}

TEST_CASE("large x collapses onto F") {
  const auto g = u_exp();
  const double x = 1000.0;
  CHECK(std::abs(dyadic_sum_representation(g, x) - dyadic_periodic_f(g, std::log2(x))) < 1e-300);
  CHECK(dyadic_sum_direct(g, x) == doctest::Approx(dyadic_periodic_f(g, std::log2(x))).epsilon(1e-12));
  CHECK(representation_tail_size(g, x) < 1e-300);
  // int_100^inf (|g'| + |g|/(u ln 2)) du at 40 digits
  CHECK(representation_tail_size(g, 100.0) == doctest::Approx(3.772731070020377e-42).epsilon(1e-10));
}

TEST_CASE("log integrability scan") {
  CHECK(check_log_integrability(u_exp()).looks_finite);
  Integrand heavy;
  heavy.name = "log_growth";
  heavy.value = [](double u) { return std::log1p(u); };
  heavy.derivative = [](double u) { return 1.0 / (1.0 + u); };
  const auto check = check_log_integrability(heavy);
  CHECK_FALSE(check.looks_finite);
  CHECK_FALSE(check.message.empty());
}

TEST_CASE("harmonic sums specialize to dyadic sums") {
  const auto g = u_exp();
  const auto spec = dyadic_spec(g);
  CHECK(harmonic_sum_direct(spec, 3.0) == dyadic_sum_direct(g, 3.0));
  CHECK(harmonic_sum_representation(spec, 10.0) == doctest::Approx(dyadic_sum_representation(g, 10.0)).epsilon(1e-12));
}

TEST_CASE("finite sums add the evaluated terms with compensation") {
  auto spec = dyadic_spec(u2_exp());
  spec.terms = 10;
  spec.weight = [](std::uint64_t k) { return k % 2 ? 1e8 : -1e8 + 0.5; };
  std::vector<double> terms;
  for (std::uint64_t k = 1; k <= 10; ++k) terms.push_back(spec.weight(k) * spec.integrand.value(spec.scale(k) * 7.0));
  CHECK(harmonic_sum_direct(spec, 7.0) == treeosc::numerics::compensated_sum(terms));
}

TEST_CASE("Poisson transform as a harmonic sum") {
  // lambda_k = 2^(k-1), mu_k = 2^(1-k): the splitting series indexed from k = 1
  HarmonicSumSpec spec;
  spec.integrand = doubled_erlang2_cdf();
  spec.weight = [](std::uint64_t k) { return std::ldexp(1.0, static_cast<int>(k) - 1); };
  spec.scale = [](std::uint64_t k) { return std::ldexp(1.0, 1 - static_cast<int>(k)); };
  spec.tail_bound = [](std::uint64_t k, double x) { return x * x * std::ldexp(1.0, 1 - static_cast<int>(k)); };
  for (double x : {0.5, 2.0, 10.0}) {
    CAPTURE(x);
    const double expected = treeosc::splitting::poisson_transform_series(x) - 1.0;
    CHECK(harmonic_sum_direct(spec, x) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(harmonic_sum_representation(spec, x) == doctest::Approx(expected).epsilon(1e-11));
  }
}

TEST_CASE("degenerate harmonic sums") {
  HarmonicSumSpec single;
  single.integrand = u_exp();
  single.weight = [](std::uint64_t) { return 1.0; };
  single.scale = [](std::uint64_t) { return 1.0; };
  single.terms = 1;
  CHECK(harmonic_sum_representation(single, 2.0) == doctest::Approx(u_exp().value(2.0)).epsilon(1e-14));

  auto zero = dyadic_spec(u_exp());
  zero.weight = [](std::uint64_t) { return 0.0; };
  CHECK(harmonic_sum_representation(zero, 2.0) == 0.0);
  CHECK(harmonic_sum_direct(zero, 2.0) == 0.0);

  auto rising = dyadic_spec(u_exp());
  rising.scale = [](std::uint64_t k) { return static_cast<double>(k); };
  CHECK_THROWS_AS(harmonic_sum_representation(rising, 1.0), std::invalid_argument);

  auto slow = dyadic_spec(u_exp());
  slow.tol.max_terms = 8;
  CHECK_THROWS_AS(harmonic_sum_representation(slow, 1.0), NonConvergence);
  CHECK_THROWS_AS(harmonic_sum_direct(slow, 1.0), NonConvergence);

  auto uncertified = dyadic_spec(u_exp());
  uncertified.tail_bound = nullptr;
  CHECK_THROWS_AS(harmonic_sum_direct(uncertified, 1.0), NonConvergence);
}

TEST_CASE("tau and Lambda") {
  const std::vector<double> scales{1.0, 0.5, 0.5, 0.25};
  CHECK(tau(scales, 2.0) == 0);
  CHECK(tau(scales, 0.75) == 1);
  CHECK(tau(scales, 0.5) == 1);
  CHECK(tau(scales, 0.3) == 3);
  CHECK(tau(scales, 0.0) == 4);
  const std::vector<double> weights{1.0, 2.0, 4.0};
  CHECK(cumulative_weight(weights, 0) == 0.0);
  CHECK(cumulative_weight(weights, 2) == 3.0);
}

}

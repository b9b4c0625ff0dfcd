#include <doctest.h>

#include <cmath>
#include <vector>

#include "treeosc/numerics.hpp"

using namespace treeosc::numerics;

TEST_SUITE("numerics") {

TEST_CASE("tolerance validation and targets") {
  Tolerance tol;
  CHECK_NOTHROW(tol.validate());
  CHECK(tol.target(0.0) == doctest::Approx(1e-13));
  CHECK(tol.target(1e3) == doctest::Approx(1e-11));
  Tolerance bad;
  bad.abs_tol = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = Tolerance{};
  bad.rel_tol = std::nan("");
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = Tolerance{};
  bad.max_terms = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("compensated sum keeps small terms next to large ones") {
  const std::vector<double> terms{1.0, 1e100, 1.0, -1e100};
  CHECK(compensated_sum(terms) == 2.0);
  CompensatedSum acc;
  for (int i = 0; i < 10; ++i) acc += 0.1;
  CHECK(acc.value() == 1.0);
}

TEST_CASE("stable_qn against direct evaluation where that is safe") {
  const double q = 0.3;
  const std::uint64_t n = 7;
  CHECK(stable_qn(q, n, QnMode::pow) == doctest::Approx(std::pow(0.7, 7)).epsilon(1e-15));
  CHECK(stable_qn(q, n, QnMode::one_minus_pow) == doctest::Approx(1 - std::pow(0.7, 7)).epsilon(1e-15));
  CHECK(stable_qn(q, n, QnMode::pow_times_linear) ==
        doctest::Approx(1 - std::pow(0.7, 7) - 7 * 0.3 * std::pow(0.7, 6)).epsilon(1e-14));
}

TEST_CASE("stable_qn in the cancellation regime") {
  // P(Bin(1000, 1e-10) >= 2), regularized incomplete beta at 40 digits
  CHECK(stable_qn(1e-10, 1000, QnMode::pow_times_linear) == doctest::Approx(4.994999667666012e-15).epsilon(1e-12));
  // 1 - (1 - 1e-12)^3 = 2.999999999997e-12
  CHECK(stable_qn(1e-12, 3, QnMode::one_minus_pow) == doctest::Approx(2.999999999997e-12).epsilon(1e-14));
  CHECK(stable_qn(0.5, 1, QnMode::pow_times_linear) == 0.0);
  CHECK(stable_qn(0.5, 0, QnMode::pow) == 1.0);
}

TEST_CASE("stable_qn rejects q outside (0, 1)") {
  CHECK_THROWS_AS(stable_qn(0.0, 3, QnMode::pow), std::domain_error);
  CHECK_THROWS_AS(stable_qn(1.0, 3, QnMode::pow), std::domain_error);
  CHECK_THROWS_AS(stable_qn(std::nan(""), 3, QnMode::pow), std::domain_error);
}

TEST_CASE("erlang2_cdf") {
  CHECK(erlang2_cdf(0.0) == 0.0);
  CHECK(erlang2_cdf(1.0) == doctest::Approx(1.0 - 2.0 / std::exp(1.0)).epsilon(1e-15));
  // y^2/2 - y^3/3 + ... at y = 1e-8
  CHECK(erlang2_cdf(1e-8) == doctest::Approx(4.99999996666666675e-17).epsilon(1e-14));
  CHECK(erlang2_cdf(0.49) == doctest::Approx(1.0 - 1.49 * std::exp(-0.49)).epsilon(1e-13));
  CHECK(erlang2_cdf(50.0) == doctest::Approx(1.0));
}

TEST_CASE("dyadic piecewise integral of e^-x over (0, inf)") {
  DyadicIntegrand f;
  f.antiderivative = [](int, double x) { return -std::exp(-x); };
  f.outside_mass_bound = [](int lo, int hi) { return std::ldexp(1.0, lo) + std::exp(-std::ldexp(1.0, hi + 1)); };
  const auto r = dyadic_piecewise_integral(f, -60, 7, Tolerance{});
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.terms_used == 68);
  CHECK(r.tail_bound <= 1e-13);
  Tolerance tight;
  tight.max_terms = 10;
  CHECK_THROWS_AS(dyadic_piecewise_integral(f, -60, 7, tight), NonConvergence);
  CHECK_THROWS_AS(dyadic_piecewise_integral(f, -5, 7, Tolerance{}), NonConvergence);
}

TEST_CASE("integrate_smooth on short and long intervals") {
  CHECK(integrate_smooth([](double x) { return std::exp(x); }, 0.0, 1.0) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
  const double lo = 1e-300;
  CHECK(integrate_smooth([](double) { return 1.0; }, lo, 2 * lo) == doctest::Approx(lo).epsilon(1e-15));
  CHECK(integrate_smooth([](double x) { return x; }, 1.0, 1.0) == 0.0);
}

}

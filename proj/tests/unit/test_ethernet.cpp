#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "treeosc/ethernet_backoff.hpp"

using namespace treeosc;
using namespace treeosc::ethernet;

namespace {

// chain iterated in 60-digit arithmetic
struct ChainCase {
  std::uint64_t t;
  double mean;
  std::vector<double> head;  // P(L = 1), P(L = 2), ...
};

const ChainCase kChain[] = {
    {1, 1.5, {0.5, 0.5}},
    {2, 1.875, {0.25, 0.625, 0.125}},
    {3, 2.171875, {0.125, 0.59375, 0.265625, 0.015625}},
    {10, 3.3672499182525584549, {0.0009765625, 0.11067390441894531, 0.4775828942656517, 0.34508334269048646}},
    {64, 5.7812415014938901046, {5.4210108624275222e-20, 2.0181379666210275e-8, 0.00051814378827310088, 0.047955342723630326}},
};

// (a, x, h(x), P(H > x)) from the density series at 60 digits
struct HCase {
  double a, x, density, survival;
};

const HCase kH[] = {
    {0.5, 0.1, 0.00029326171728842546711, 0.9999956285892754409},
    {0.5, 0.5, 0.15325588276563087497, 0.97958287097676584659},
    {0.5, 1, 0.42073042153167206911, 0.82632698821113497162},
    {0.5, 2, 0.34333564222146533509, 0.40559656667946290251},
    {0.5, 5, 0.023017395802870487044, 0.02317459711892629542},
    {0.3, 0.1, 0.057429660385226313947, 0.99841455414705212029},
    {0.3, 0.5, 0.55256683913212633414, 0.85815623659864056397},
    {0.3, 1, 0.51730121110127714195, 0.57551992596539608473},
    {0.3, 2, 0.2179346075491529034, 0.22001187440592981301},
    {0.3, 5, 0.010997934807252390116, 0.010998029115028879523},
    {0.7, 0.1, 2.2628131409123937452e-11, 0.99999999999984504522},
    {0.7, 0.5, 0.00047910672628425659813, 0.99997305917037747783},
    {0.7, 1, 0.032288236291136625862, 0.99483636565843875722},
    {0.7, 2, 0.27114204537681610897, 0.84650845038376876404},
    {0.7, 5, 0.10092555021137721635, 0.11758969876579366116},
};

}  // namespace

TEST_SUITE("ethernet") {

TEST_CASE("chain law against exact iteration") {
  for (const auto& c : kChain) {
    CAPTURE(c.t);
    const auto d = chain_distribution_at(0.5, c.t, 0.0);
    CHECK(d.mean() == doctest::Approx(c.mean).epsilon(1e-14));
    for (std::size_t i = 0; i < c.head.size(); ++i) CHECK(d.prob(i + 1) == doctest::Approx(c.head[i]).epsilon(1e-13));
    CHECK(d.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  }
  const auto d0 = chain_distribution_at(0.5, 0);
  CHECK(d0.prob(1) == 1.0);
  CHECK(d0.cdf(0) == 0.0);
  CHECK(d0.cdf(1) == 1.0);
}

TEST_CASE("stepping, snapshots and the full sequence agree") {
  BackoffChain chain(0.5);
  chain.advance(7);
  chain.step();
  const auto all = chain_distribution(0.5, 8);
  const auto snaps = chain_snapshots(0.5, {3, 8});
  REQUIRE(all.size() == 9);
  CHECK(chain.time() == 8);
  CHECK(chain.distribution().probs == all[8].probs);
  CHECK(snaps[1].probs == all[8].probs);
  CHECK(snaps[0].probs == all[3].probs);
  CHECK_THROWS_AS(chain.advance_to(3), std::invalid_argument);
  CHECK_THROWS_AS(chain_snapshots(0.5, {5, 3}), std::invalid_argument);
  CHECK_THROWS_AS(BackoffChain(1.0), std::invalid_argument);
}

TEST_CASE("trimming stays within its budget") {
  const auto d = chain_distribution_at(0.5, 1u << 16, 1e-12);
  CHECK(d.truncation_mass <= 1e-12);
  // kept plus dropped mass is 1 up to rounding accumulated over 2^16 steps
  CHECK(std::abs(d.total_mass() + d.truncation_mass - 1.0) < 1e-11);
  CHECK(d.probs.size() < 64);
}

TEST_CASE("sojourns and sampled counters") {
  Rng gen = make_stream(2024, 0);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  std::uint64_t smallest = UINT64_MAX;
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(sample_sojourn(0.5, 2, gen));
    sum += s;
    sq += s * s;
    smallest = std::min<std::uint64_t>(smallest, static_cast<std::uint64_t>(s));
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean - 4.0) < 4 * se);
  CHECK(smallest == 1);

  // L(10) from sampled sojourns against the chain law
  const auto exact = chain_distribution_at(0.5, 10, 0.0);
  std::map<std::uint32_t, int> counts;
  Rng gen2 = make_stream(2024, 1);
  for (int i = 0; i < n; ++i) ++counts[sample_counter_at(0.5, 10, gen2)];
  double tv = 0.0;
  for (std::uint32_t k = 1; k <= 11; ++k) tv += std::abs(counts[k] / double(n) - exact.prob(k));
  CHECK(tv / 2 < 0.005);

  Rng gen3 = make_stream(2024, 2);
  const auto path = sample_counter_path(0.5, 50, gen3);
  CHECK(path.size() == 51);
  CHECK(path.front() == 1);
  for (std::size_t i = 1; i < path.size(); ++i) CHECK(path[i] - path[i - 1] <= 1);
}

TEST_CASE("density of H against high-precision values") {
  for (const auto& c : kH) {
    CAPTURE(c.a);
    CAPTURE(c.x);
    const auto spec = make_h_density_spec(c.a);
    CHECK(h_survival(spec, c.x) == doctest::Approx(c.survival).epsilon(1e-13));
    if (c.x >= spec.x_min) {
      CHECK(h_density(spec, c.x) == doctest::Approx(c.density).epsilon(spec.rel_precision));
    } else {
      CHECK_THROWS_AS(h_density(spec, c.x), PrecisionLoss);
    }
  }
}

TEST_CASE("the fence and the error bound below it") {
  const auto spec = make_h_density_spec(0.7);
  CHECK(spec.x_min > 0.2);
  CHECK(spec.x_min < 0.5);
  // true values at 60 digits
  const auto v = h_density_unchecked(spec, 0.2);
  CHECK(std::abs(v.value - 1.0289991713193395818e-7) <= v.error_bound);
  CHECK(v.error_bound > 1e-8 * 1.0289991713193395818e-7);
  const auto half = make_h_density_spec(0.5);
  CHECK(h_density(half, 0.045) == doctest::Approx(2.1231805385698808925e-6).epsilon(1e-8));
  CHECK(h_survival(half, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h_cdf(half, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(make_h_density_spec(1.0), std::invalid_argument);
}

TEST_CASE("automatic depth") {
  for (double a : {0.3, 0.5, 0.7, 0.9}) {
    CAPTURE(a);
    const auto spec = make_h_density_spec(a);
    const auto n = spec.depth;
    CHECK(std::abs(spec.coeffs[n]) * std::pow(a, -n) >= 1e-20);
    const double next = spec.coeffs[n] / (1.0 - std::pow(a, -(n + 1)));
    CHECK(std::abs(next) * std::pow(a, -(n + 1)) < 1e-20);
  }
  CHECK(make_h_density_spec(0.5, 6).depth == 6);
}

TEST_CASE("samples of H follow the survival function") {
  const auto spec = make_h_density_spec(0.5);
  Rng gen = make_stream(77, 0);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = sample_h(0.5, default_sample_depth(0.5), gen);
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = h_cdf(spec, xs[i]);
    ks = std::max({ks, std::abs(f - double(i) / xs.size()), std::abs(f - double(i + 1) / xs.size())});
  }
  CHECK(ks < 1.63 / std::sqrt(double(xs.size())));
  CHECK(std::pow(0.5, default_sample_depth(0.5)) / 0.5 < 1e-12);
}

TEST_CASE("scaled partial sums approach H") {
  const std::vector<double> xs{0.5, 1.0, 2.0, 4.0};
  const auto exact = partial_sum_tail(0.5, 20, xs, PartialSumMode::exact_chain);
  const auto spec = make_h_density_spec(0.5);
  Rng gen = make_stream(5, 0);
  const auto mc = partial_sum_tail(0.5, 20, xs, PartialSumMode::monte_carlo, &gen, 100000);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CAPTURE(xs[i]);
    CHECK(std::abs(exact[i] - h_survival(spec, xs[i])) < 1e-4);
    const double se = std::sqrt(exact[i] * (1 - exact[i]) / 100000);
    CHECK(std::abs(mc[i] - exact[i]) < 4 * se + 1e-12);
  }
  CHECK(partial_sum_tail(0.5, 3, 0.0, PartialSumMode::exact_chain) == 1.0);
  CHECK_THROWS_AS(partial_sum_tail(0.5, 3, 1.0, PartialSumMode::monte_carlo), std::invalid_argument);
  CHECK_THROWS_AS(partial_sum_tail(0.5, 0, 1.0, PartialSumMode::exact_chain), std::invalid_argument);
}

TEST_CASE("limit law") {
  const auto spec = make_h_density_spec(0.5);
  for (double x : {0.0, 0.25, 0.5}) {
    CAPTURE(x);
    double previous = 0.0;
    for (double z = -6.0; z <= 6.0; z += 0.125) {
      const double f = limit_distribution_cdf(spec, x, z);
      CHECK(f >= previous);
      CHECK(f == limit_distribution_cdf(spec, x + 1.0, z));
      previous = f;
    }
    CHECK(limit_distribution_cdf(spec, x, -40.0) == 0.0);
    CHECK(limit_distribution_cdf(spec, x, 40.0) == doctest::Approx(1.0));
  }
  CHECK(limit_distribution_cdf(0.5, 0.25, 0.1) == limit_distribution_cdf(spec, 0.25, 0.1));
  CHECK(limit_phase_ks_distance(spec, 0.0, 0.5) > 1e-3);
  CHECK(limit_phase_ks_distance(spec, 0.25, 1.25) == 0.0);
  // P(L(2^n) - n <= m) -> P(H >= 2^-m)
  CHECK(limit_counter_cdf(spec, 0.0, 1) == doctest::Approx(h_survival(spec, 0.5)).epsilon(1e-15));
}

TEST_CASE("exact chain approaches the limit law") {
  const auto spec = make_h_density_spec(0.5);
  const auto snaps = chain_snapshots(0.5, {1u << 8, 1u << 12, 1u << 16});
  const double ks8 = limit_ks_distance(snaps[0], spec);
  const double ks12 = limit_ks_distance(snaps[1], spec);
  const double ks16 = limit_ks_distance(snaps[2], spec);
  CHECK(ks8 < 0.01);
  CHECK(ks12 < ks8);
  CHECK(ks16 < ks12);
  CHECK(ks16 < 1e-4);
}

TEST_CASE("Laplace transforms") {
  const auto pair = laplace_compare(0.5, std::ldexp(1.0, 16), 0.5);
  CHECK(std::abs(pair.chain - pair.limit) / pair.limit < 1e-3);
  const auto spec = make_h_density_spec(0.5);
  CHECK(laplace_limit_side(spec, std::ldexp(1.0, 16), 0.5) == pair.limit);
  // lambda -> 0 gives total mass 1
  CHECK(laplace_limit_side(spec, 1000.0, 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(laplace_compare(0.5, 100.0, -1.0), std::invalid_argument);
}

TEST_CASE("mean drift stays bounded") {
  std::vector<std::uint64_t> times;
  for (int j = 3; j <= 16; ++j) times.push_back(std::uint64_t{1} << j);
  const auto snaps = chain_snapshots(0.5, times);
  for (int j = 3; j <= 16; ++j) CHECK(std::abs(snaps[j - 3].mean() - j) < 0.3);
  // E L(2^16) - 16 from an independent float64 iteration
  CHECK(snaps.back().mean() - 16 == doctest::Approx(-0.2738927355762595).epsilon(1e-9));
}

}

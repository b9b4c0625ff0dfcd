#include "treeosc/ethernet_backoff.hpp"

#include <cfloat>
#include <numeric>

#include "treeosc/numerics.hpp"

namespace treeosc::ethernet {

using numerics::CompensatedSum;

namespace {

void require_ratio(double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("backoff ratio a must lie in (0, 1)");
}

double log_base_inverse(double a, double v) { return std::log(v) / -std::log(a); }

}  // namespace

double BackoffDistribution::prob(std::uint64_t counter) const {
  if (counter < first_counter || counter > last_counter()) return 0.0;
  return probs[counter - first_counter];
}

double BackoffDistribution::cdf(std::uint64_t counter) const {
  if (counter < first_counter) return 0.0;
  CompensatedSum acc;
  const std::uint64_t stop = std::min<std::uint64_t>(counter, last_counter());
  for (std::uint64_t k = first_counter; k <= stop; ++k) acc += probs[k - first_counter];
  return acc.value();
}

double BackoffDistribution::mean() const {
  CompensatedSum acc;
  for (std::size_t i = 0; i < probs.size(); ++i) acc += probs[i] * static_cast<double>(first_counter + i);
  return acc.value();
}

double BackoffDistribution::total_mass() const {
  CompensatedSum acc;
  for (double p : probs) acc += p;
  acc += truncation_mass;
  return acc.value();
}

BackoffChain::BackoffChain(double a, double tail_cut) : tail_cut_(tail_cut) {
  require_ratio(a);
  if (!(tail_cut >= 0.0)) throw std::invalid_argument("tail_cut must be non-negative");
  dist_.a = a;
  dist_.t = 0;
  dist_.first_counter = 1;
  dist_.probs = {1.0};
  powers_ = {1.0};
}

double BackoffChain::increment_probability(std::uint64_t counter) {
  while (powers_.size() <= counter) {
    powers_.push_back(std::pow(dist_.a, static_cast<double>(powers_.size())));
  }
  return powers_[counter];
}

void BackoffChain::step() {
  auto& p = dist_.probs;
  const std::size_t n = p.size();
  const std::uint64_t k0 = dist_.first_counter;
  increment_probability(k0 + n);
  const double* up = powers_.data() + k0;  // up[i] = a^{k0+i}
  scratch_.resize(n + 1);
  scratch_[0] = p[0] * (1.0 - up[0]);
  for (std::size_t i = 1; i < n; ++i) scratch_[i] = p[i] * (1.0 - up[i]) + p[i - 1] * up[i - 1];
  scratch_[n] = p[n - 1] * up[n - 1];
  ++dist_.t;
  trim();
}

void BackoffChain::trim() {
  double budget = tail_cut_ - dist_.truncation_mass;
  std::size_t lo = 0;
  std::size_t hi = scratch_.size() - 1;
  // Entries near the subnormal range go regardless of the budget; they would
  // only slow every later step down.
  constexpr double kNegligible = 1e-280;
  const auto droppable = [&](double v) { return v <= budget || v < kNegligible; };
  while (lo < hi && droppable(scratch_[lo])) {
    budget -= scratch_[lo];
    dist_.truncation_mass += scratch_[lo];
    ++lo;
  }
  while (hi > lo && droppable(scratch_[hi])) {
    budget -= scratch_[hi];
    dist_.truncation_mass += scratch_[hi];
    --hi;
  }
  if (lo == 0) {
    scratch_.resize(hi + 1);
    std::swap(dist_.probs, scratch_);
  } else {
    dist_.probs.assign(scratch_.begin() + static_cast<std::ptrdiff_t>(lo),
                       scratch_.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  }
  dist_.first_counter += static_cast<std::uint32_t>(lo);
}

void BackoffChain::advance(std::uint64_t steps) {
  for (std::uint64_t i = 0; i < steps; ++i) step();
}

void BackoffChain::advance_to(std::uint64_t t) {
  if (t < dist_.t) throw std::invalid_argument("chain cannot run backwards");
  advance(t - dist_.t);
}

std::vector<BackoffDistribution> chain_distribution(double a, std::uint64_t t_max, double tail_cut) {
  BackoffChain chain(a, tail_cut);
  std::vector<BackoffDistribution> out;
  out.reserve(t_max + 1);
  out.push_back(chain.distribution());
  for (std::uint64_t t = 1; t <= t_max; ++t) {
    chain.step();
    out.push_back(chain.distribution());
  }
  return out;
}

BackoffDistribution chain_distribution_at(double a, std::uint64_t t, double tail_cut) {
  BackoffChain chain(a, tail_cut);
  chain.advance(t);
  return chain.distribution();
}

std::vector<BackoffDistribution> chain_snapshots(double a, const std::vector<std::uint64_t>& times,
                                                 double tail_cut) {
  if (!std::is_sorted(times.begin(), times.end())) throw std::invalid_argument("snapshot times must be sorted");
  BackoffChain chain(a, tail_cut);
  std::vector<BackoffDistribution> out;
  out.reserve(times.size());
  for (std::uint64_t t : times) {
    chain.advance_to(t);
    out.push_back(chain.distribution());
  }
  return out;
}

HDensitySpec make_h_density_spec(double a, int depth, double rel_precision) {
  require_ratio(a);
  if (depth < 0) throw std::invalid_argument("depth must be non-negative");
  if (!(rel_precision > 0.0)) throw std::invalid_argument("rel_precision must be positive");
  HDensitySpec spec;
  spec.a = a;
  spec.rel_precision = rel_precision;

  CompensatedSum log_product;  // sum_k log(1 - a^k)
  for (int k = 1;; ++k) {
    const double ak = std::pow(a, k);
    if (ak < 1e-18) break;
    log_product += std::log1p(-ak);
  }
  spec.prefactor = std::exp(-log_product.value());

  const int max_depth = 400;
  std::vector<double> coeffs{spec.prefactor};
  for (int n = 1; n <= max_depth + 1; ++n) {
    coeffs.push_back(coeffs.back() / (1.0 - std::pow(a, -n)));
    const bool enough =
        depth > 0 ? n == depth + 1 : std::abs(coeffs.back()) * std::pow(a, -n) < 1e-20;
    if (enough) break;
  }
  coeffs.pop_back();
  spec.coeffs = std::move(coeffs);
  spec.depth = static_cast<int>(spec.coeffs.size()) - 1;

  // Fence: smallest x where the cancellation error stays within rel_precision.
  const auto precise = [&](double x) {
    const SeriesValue v = h_density_unchecked(spec, x);
    return v.value > 0.0 && v.error_bound <= spec.rel_precision * v.value;
  };
  double hi = 1.0 / (1.0 - a);
  while (!precise(hi) && hi < 1e6) hi *= 2.0;
  double lo = hi;
  while (precise(lo) && lo > 1e-12) lo /= 2.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = std::sqrt(lo * hi);
    (precise(mid) ? hi : lo) = mid;
  }
  spec.x_min = hi;
  return spec;
}

SeriesValue h_density_unchecked(const HDensitySpec& spec, double x) {
  if (!(x > 0.0)) return {0.0, 0.0};
  CompensatedSum acc;
  double magnitude = 0.0;
  double rate = 1.0;  // a^-n
  for (int n = 0; n <= spec.depth; ++n) {
    const double term = spec.coeffs[static_cast<std::size_t>(n)] * rate * std::exp(-rate * x);
    acc += term;
    magnitude += std::abs(term);
    rate /= spec.a;
  }
  const double omitted =
      std::abs(spec.coeffs.back() / (1.0 - rate)) * rate * std::exp(-rate * x);
  return {acc.value(), 4.0 * DBL_EPSILON * magnitude + omitted};
}

double h_density(const HDensitySpec& spec, double x) {
  if (x < spec.x_min) {
    throw PrecisionLoss("h_density: x = " + std::to_string(x) + " below the cancellation fence x_min = " +
                        std::to_string(spec.x_min));
  }
  return h_density_unchecked(spec, x).value;
}

double h_survival(const HDensitySpec& spec, double x) {
  if (!(x > 0.0)) return 1.0;
  CompensatedSum acc;
  double rate = 1.0;
  for (int n = 0; n <= spec.depth; ++n) {
    acc += spec.coeffs[static_cast<std::size_t>(n)] * std::exp(-rate * x);
    rate /= spec.a;
  }
  return std::clamp(acc.value(), 0.0, 1.0);
}

double h_cdf(const HDensitySpec& spec, double x) { return 1.0 - h_survival(spec, x); }

int default_sample_depth(double a) {
  require_ratio(a);
  int depth = 1;
  while (std::pow(a, depth) / (1.0 - a) >= 1e-12) ++depth;
  return depth;
}

double partial_sum_tail(double a, int n, double x, PartialSumMode mode, Rng* gen, std::uint64_t replicas) {
  return partial_sum_tail(a, n, std::vector<double>{x}, mode, gen, replicas).front();
}

std::vector<double> partial_sum_tail(double a, int n, const std::vector<double>& xs, PartialSumMode mode,
                                     Rng* gen, std::uint64_t replicas) {
  require_ratio(a);
  if (n < 1) throw std::invalid_argument("partial_sum_tail requires n >= 1");
  const double scale = std::pow(a, n);
  std::vector<double> out(xs.size(), 1.0);

  if (mode == PartialSumMode::monte_carlo) {
    if (gen == nullptr) throw std::invalid_argument("monte_carlo mode needs a generator");
    if (replicas == 0) throw std::invalid_argument("replicas must be positive");
    std::vector<double> sums(replicas);
    for (auto& s : sums) {
      double total = 0.0;
      for (int k = 1; k <= n; ++k) {
        total += static_cast<double>(sample_sojourn(a, static_cast<std::uint64_t>(k), *gen) - 1);
      }
      s = scale * total;
    }
    std::sort(sums.begin(), sums.end());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto below = std::lower_bound(sums.begin(), sums.end(), xs[i]) - sums.begin();
      out[i] = static_cast<double>(sums.size() - static_cast<std::size_t>(below)) / static_cast<double>(sums.size());
    }
    return out;
  }

  // sum G >= x a^-n  <=>  T_1+...+T_n >= s with s = ceil(n + x a^-n)  <=>  L(s-1) <= n.
  std::vector<std::pair<std::uint64_t, std::size_t>> times;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double s = std::ceil(static_cast<double>(n) + xs[i] / scale);
    if (s <= 0.0) continue;  // P(sum >= nonpositive) = 1
    times.emplace_back(static_cast<std::uint64_t>(s) - 1, i);
  }
  std::sort(times.begin(), times.end());
  BackoffChain chain(a, 1e-18);
  for (const auto& [t, i] : times) {
    chain.advance_to(t);
    out[i] = chain.distribution().cdf(static_cast<std::uint64_t>(n));
  }
  return out;
}

double limit_counter_cdf(const HDensitySpec& spec, double x, long m) {
  const double phase = x - std::floor(x);
  const double shift = std::floor(x);
  // P(H >= a^{m - x}); m - x = (m - shift) - phase
  const double exponent = (static_cast<double>(m) - shift) - phase;
  return h_survival(spec, std::pow(spec.a, exponent));
}

double limit_distribution_cdf(const HDensitySpec& spec, double x, double z) {
  if (!std::isfinite(x) || !std::isfinite(z)) throw std::invalid_argument("limit_distribution_cdf needs finite x, z");
  const double shift = std::floor(x);
  const double phase = x - shift;
  const double m = std::floor(z + phase);
  return h_survival(spec, std::pow(spec.a, m - phase));
}

double limit_distribution_cdf(double a, double x, double z) {
  return limit_distribution_cdf(make_h_density_spec(a), x, z);
}

namespace {

// Counter offsets m where the limit law carries mass: thresholds a^{m-x} from 1e3 down to 1e-8.
std::pair<long, long> limit_support(double a, double x) {
  const double lo = x + std::log(1e3) / std::log(a);
  const double hi = x + std::log(1e-8) / std::log(a);
  return {static_cast<long>(std::floor(lo)) - 1, static_cast<long>(std::ceil(hi)) + 1};
}

}  // namespace

double limit_ks_distance(const BackoffDistribution& dist, const HDensitySpec& spec) {
  if (dist.t == 0) throw std::invalid_argument("limit_ks_distance needs t >= 1");
  const double level = log_base_inverse(spec.a, static_cast<double>(dist.t));
  const double n = std::floor(level);
  const double phase = level - n;
  const auto [m_lo, m_hi] = limit_support(spec.a, phase);
  const long base = static_cast<long>(n);
  const long k_lo = std::max<long>(1, base + m_lo);
  const long k_hi = std::max<long>(base + m_hi, static_cast<long>(dist.last_counter()));
  double worst = 0.0;
  double chain_cdf = dist.cdf(static_cast<std::uint64_t>(k_lo) - 1);
  for (long k = k_lo; k <= k_hi; ++k) {
    chain_cdf += dist.prob(static_cast<std::uint64_t>(k));
    worst = std::max(worst, std::abs(chain_cdf - limit_counter_cdf(spec, phase, k - base)));
  }
  return worst;
}

double limit_phase_ks_distance(const HDensitySpec& spec, double x1, double x2) {
  const double p1 = x1 - std::floor(x1);
  const double p2 = x2 - std::floor(x2);
  const auto [lo1, hi1] = limit_support(spec.a, p1);
  const auto [lo2, hi2] = limit_support(spec.a, p2);
  double worst = 0.0;
  // Jumps of law 1 sit at z = m - p1, where law 1 has counter offset m and law 2
  // has floor(m - p1 + p2); symmetric for law 2.
  for (long m = std::min(lo1, lo2); m <= std::max(hi1, hi2); ++m) {
    const double z1 = static_cast<double>(m) - p1;
    const auto m2 = static_cast<long>(std::floor(z1 + p2));
    worst = std::max(worst, std::abs(limit_counter_cdf(spec, p1, m) - limit_counter_cdf(spec, p2, m2)));
    const double z2 = static_cast<double>(m) - p2;
    const auto m1 = static_cast<long>(std::floor(z2 + p1));
    worst = std::max(worst, std::abs(limit_counter_cdf(spec, p1, m1) - limit_counter_cdf(spec, p2, m)));
  }
  return worst;
}

double laplace_limit_side(const HDensitySpec& spec, double t, double lambda) {
  if (!(t >= 1.0) || !(lambda > 0.0)) throw std::invalid_argument("laplace_compare needs t >= 1, lambda > 0");
  // ceil(log_b(t/H)) = j  <=>  t a^j <= H < t a^{j-1}
  const double level = log_base_inverse(spec.a, t);
  const auto j_lo = static_cast<long>(std::floor(level - log_base_inverse(spec.a, 1e3)));
  const auto j_hi = static_cast<long>(std::ceil(level - log_base_inverse(spec.a, 1e-8))) + 1;
  CompensatedSum acc;
  for (long j = j_lo; j <= j_hi; ++j) {
    const double jd = static_cast<double>(j);
    const double mass = h_survival(spec, t * std::pow(spec.a, jd)) - h_survival(spec, t * std::pow(spec.a, jd - 1.0));
    acc += std::exp(-lambda * jd) * mass;
  }
  return acc.value();
}

LaplacePair laplace_compare(double a, double t, double lambda, double tail_cut) {
  require_ratio(a);
  if (!(t >= 1.0) || !(lambda > 0.0)) throw std::invalid_argument("laplace_compare needs t >= 1, lambda > 0");
  const BackoffDistribution dist = chain_distribution_at(a, static_cast<std::uint64_t>(std::floor(t)), tail_cut);
  LaplacePair out;
  CompensatedSum acc;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    acc += dist.probs[i] * std::exp(-lambda * static_cast<double>(dist.first_counter + i));
  }
  out.chain = acc.value();
  out.limit = laplace_limit_side(make_h_density_spec(a), t, lambda);
  return out;
}

}  // namespace treeosc::ethernet

#pragma once

// Seeded generators and the handful of variates every sampler needs. All
// transforms are written out here rather than taken from <random>
// distributions so results are bit-identical across standard libraries.

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>

namespace treeosc {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for stream `index` of `master_seed`; distinct indices give unrelated streams.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(mix64(master_seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t index) {
  return Rng(derive_seed(master_seed, index));
}

/// Uniform on (0, 1], multiples of 2^-53.
template <class Gen>
double uniform_open_closed(Gen& gen) {
  return static_cast<double>((static_cast<std::uint64_t>(gen()) >> 11) + 1) * 0x1.0p-53;
}

/// Uniform on [0, 1), multiples of 2^-53.
template <class Gen>
double uniform_closed_open(Gen& gen) {
  return static_cast<double>(static_cast<std::uint64_t>(gen()) >> 11) * 0x1.0p-53;
}

/// Unit-rate exponential by inversion, -ln U with U in (0, 1].
template <class Gen>
double standard_exponential(Gen& gen) {
  return -std::log(uniform_open_closed(gen));
}

__extension__ using uint128 = unsigned __int128;

/// Uniform integer in [0, bound) by Lemire's multiply-and-reject.
template <class Gen>
std::uint64_t bounded_uniform(Gen& gen, std::uint64_t bound) {
  std::uint64_t x = gen();
  uint128 m = static_cast<uint128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = gen();
      m = static_cast<uint128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Binomial(n, 1/2) as a popcount over n generator bits.
template <class Gen>
std::uint64_t fair_binomial(Gen& gen, std::uint64_t n) {
  std::uint64_t count = 0;
  while (n >= 64) {
    count += static_cast<std::uint64_t>(std::popcount(static_cast<std::uint64_t>(gen())));
    n -= 64;
  }
  if (n > 0) {
    const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    count += static_cast<std::uint64_t>(std::popcount(static_cast<std::uint64_t>(gen()) & mask));
  }
  return count;
}

}  // namespace treeosc

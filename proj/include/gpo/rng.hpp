#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace gpo {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to turn structured keys into well-mixed seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for a stream identified by (master seed, key...). Chains use
/// (master, temperature index, chain index) so results do not depend on
/// execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632BE59BD9B4E019ULL));
  return h;
}

inline Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  return Rng(derive_seed(master, keys));
}

/// Uniform draw on the open interval (0, 1); zero is resampled.
inline double uniform_open(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  while (u <= 0.0) u = unit(rng);
  return u;
}

}  // namespace gpo

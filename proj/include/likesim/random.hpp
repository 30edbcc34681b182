#pragma once

#include <cstdint>
#include <random>

namespace likesim {

/// Generator used across the library. mt19937_64 output is specified
/// bit-for-bit by the standard, so seeded runs reproduce on any platform.
/// Distribution adapters from <random> are *not* used anywhere: they are
/// implementation-defined, which would break cross-platform determinism.
using Engine = std::mt19937_64;

namespace detail {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Seed for sub-stream `index` of the stream tagged `tag`, derived from a
/// root seed. Streams with distinct (tag, index) pairs are decorrelated, so
/// iterations and sweep points can run concurrently without sharing state.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                 std::uint64_t index) noexcept {
  const std::uint64_t base = detail::mix64(seed ^ detail::mix64(tag));
  return detail::mix64(base + index * 0x9e3779b97f4a7c15ULL);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Rejection sampling; exact and platform-stable.
inline std::uint64_t uniform_below(Engine& rng, std::uint64_t n) {
  const std::uint64_t rem = (0 - n) % n;  // 2^64 mod n
  if (rem == 0) return rng() % n;
  const std::uint64_t limit = 0 - rem;  // largest multiple of n below 2^64
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

}  // namespace likesim

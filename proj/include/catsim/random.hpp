#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace catsim {

using Engine = std::mt19937_64;

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream seed for (seed, key...). Pure function of its inputs, so streams do
/// not depend on the order in which they are requested.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline std::uint64_t seed_key(double value) { return std::bit_cast<std::uint64_t>(value); }

/// Uniform on [0, 1) with 53 random bits; identical across standard libraries.
inline double uniform01(Engine& engine) { return double(engine() >> 11) * 0x1.0p-53; }

}  // namespace catsim

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace salientcut {

// Counter-based randomness: every draw is a pure function of its key, so
// results do not depend on evaluation order or thread count.

constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix64(seed ^ mix64(a ^ mix64(b ^ 0x5851F42D4C957F2DULL)));
}

/// [0, 1) with 53 random bits.
constexpr double unit_double(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Two independent standard normals (Box-Muller) for the given key.
inline std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t h1 = counter_hash(seed, a, b);
  const std::uint64_t h2 = mix64(h1 ^ 0xD1B54A32D192ED03ULL);
  const double u1 = 1.0 - unit_double(h1);  // (0, 1]
  const double u2 = unit_double(h2);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

/// Seed for a per-frame stream derived from a run seed.
constexpr std::uint64_t frame_seed(std::uint64_t seed, std::uint64_t frame, std::uint64_t stream) {
  return counter_hash(seed, frame, stream);
}

}  // namespace salientcut

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace relu2 {

// mt19937_64 is bit-stable across platforms; the distributions below avoid
// std::uniform_real_distribution and friends, whose output is
// implementation-defined.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

/// Standard normal via Box-Muller; draws exactly two engine values per call.
inline double gaussian(std::mt19937_64& rng) {
  double u1 = uniform_unit(rng);
  double u2 = uniform_unit(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// Uniform draw from the closed ball of the given center and radius.
inline std::vector<double> uniform_in_ball(std::mt19937_64& rng,
                                           const std::vector<double>& center,
                                           double radius) {
  const std::size_t d = center.size();
  std::vector<double> p(d);
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    p[i] = gaussian(rng);
    norm_sq += p[i] * p[i];
  }
  double norm = std::sqrt(norm_sq);
  if (norm == 0.0) norm = 1.0;
  const double r = radius * std::pow(uniform_unit(rng), 1.0 / static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i) p[i] = center[i] + r * p[i] / norm;
  return p;
}

}  // namespace relu2

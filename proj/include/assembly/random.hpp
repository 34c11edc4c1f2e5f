#pragma once

#include <cstdint>
#include <random>

namespace assembly {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits. Unlike
/// std::uniform_real_distribution the mapping is identical on every standard
/// library, which keeps seeded streams reproducible across toolchains.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Uniform in the closed interval [-bound, bound].
inline double uniform_symmetric(Rng& rng, double bound) {
  const double u = static_cast<double>(rng() >> 11) / static_cast<double>((1ULL << 53) - 1);
  return bound * (2.0 * u - 1.0);
}

}  // namespace assembly

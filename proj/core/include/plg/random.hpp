#pragma once

#include <cstdint>
#include <random>

namespace plg {

// mt19937_64's output sequence is fixed by the standard; the distribution
// helpers below avoid <random> distributions, whose output is
// implementation-defined, so seeded results match across toolchains.
using Rng = std::mt19937_64;

/// Uniform integer in [0, n), rejection sampling (unbiased).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = Rng::max() - (Rng::max() % n);
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

/// Uniform real in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Standard normal via Box-Muller (one value per call).
double standard_normal(Rng& rng);

}  // namespace plg

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace nextcell {

/// All randomness flows through explicit mt19937_64 states handed in by the
/// caller. The helpers below map raw 64-bit draws to distributions directly so
/// that generated streams do not depend on the standard library in use.
using Rng = std::mt19937_64;

/// SplitMix64 mix step; used to derive independent child seeds from a master
/// seed and a stream index.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Child stream for (seed, index); streams for distinct indices are independent.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(seed ^ splitmix64(index + 0x51ed2701a3c5e1b7ULL)));
}

/// Uniform double in [0, 1) with 53 bits of resolution.
inline double u01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * u01(rng); }

/// Uniform index in [0, n). n must be > 0.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    // 53-bit mantissa path keeps the draw platform-stable; bias is < 2^-40 for
    // any n this project uses.
    auto k = static_cast<std::size_t>(u01(rng) * static_cast<double>(n));
    return k < n ? k : n - 1;
}

/// Exponential variate with the given rate (mean 1/rate).
inline double exponential(Rng& rng, double rate) {
    return -std::log1p(-u01(rng)) / rate;
}

} // namespace nextcell

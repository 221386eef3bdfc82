// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace fcd {

/// splitmix64 finalizer. All randomness in the project flows through this
/// mix so results are identical across platforms and standard libraries.
inline uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Stateless counter hash: one uint64 per (seed, k1, k2, k3) tuple.
/// Used for per-pixel random streams so parallel generation is
/// schedule-independent.
inline uint64_t counter_hash(uint64_t seed, uint64_t k1, uint64_t k2 = 0, uint64_t k3 = 0) {
    uint64_t h = mix64(seed);
    h = mix64(h ^ k1);
    h = mix64(h ^ k2);
    h = mix64(h ^ k3);
    return h;
}

/// Uniform double in [0, 1) from 53 high bits.
inline double u01_from_bits(uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

/// Standard normal via Box-Muller from two counter-hash draws.
inline double gaussian_from_counters(uint64_t seed, uint64_t k1, uint64_t k2, uint64_t k3) {
    double u1 = u01_from_bits(counter_hash(seed, k1, k2, k3 * 2));
    const double u2 = u01_from_bits(counter_hash(seed, k1, k2, k3 * 2 + 1));
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Sequential splitmix64 stream for shuffles and subsampling.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double u01() { return u01_from_bits(next()); }

    /// Uniform integer in [0, n). Lemire multiply-shift; the O(2^-64) bias is
    /// irrelevant here and the result is stdlib-independent.
    uint64_t bounded(uint64_t n) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(next()) * n) >> 64);
    }

private:
    uint64_t state_;
};

/// Deterministic Fisher-Yates shuffle.
template <typename T>
void seeded_shuffle(std::vector<T>& v, SplitMix64& rng) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.bounded(i)]);
}

} // namespace fcd

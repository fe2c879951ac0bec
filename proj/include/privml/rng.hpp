#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace privml {

/// PRNG contract: every random choice in the library draws from a
/// std::mt19937_64 seeded with a caller-supplied 64-bit seed, through the
/// helpers below. The helpers avoid std::uniform_*_distribution and
/// std::shuffle, whose outputs are implementation-defined, so a given seed
/// produces the same stream on every platform. Artifacts record the
/// identifier returned by rng_algorithm_id().
inline const char* rng_algorithm_id() { return "mt19937_64"; }

using Rng = std::mt19937_64;

/// splitmix64 step, used to derive independent sub-seeds (per ensemble
/// member, per repetition) from a master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Integer in [0, n). Modulo method; bias is negligible for the small n
/// used here and the mapping is fixed by this definition.
inline std::uint64_t bounded(Rng& rng, std::uint64_t n) {
    return rng() % n;
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Standard normal via Box-Muller. Consumes exactly two draws.
inline double gauss(Rng& rng) {
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

/// Fisher-Yates shuffle using bounded().
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(bounded(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

/// First k elements of a Fisher-Yates pass over [0, n): a k-subset drawn
/// without replacement, order deterministic for a fixed rng state.
inline std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(bounded(rng, n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k < n ? k : n);
    return idx;
}

}  // namespace privml

#pragma once

/// Counter-based random numbers (Philox4x32-10).
///
/// Every draw is a pure function of (seed, stream, index), so Brownian
/// increment (mode j, step m) is reproducible bit-for-bit regardless of
/// how many modes or steps a run samples, and refining a truncation never
/// reshuffles existing paths.

#include <cmath>
#include <cstdint>

namespace logconvex::rng {

namespace detail {

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

struct Block {
    std::uint32_t v[4];
};

// Philox4x32-10 (multipliers 0xD2511F53 / 0xCD9E8D57, Weyl constants
// 0x9E3779B9 / 0xBB67AE85).
inline Block philox(std::uint64_t key, std::uint32_t c0, std::uint32_t c1,
                    std::uint32_t c2, std::uint32_t c3) {
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo32(0xD2511F53u, c0, hi0, lo0);
        mulhilo32(0xCD9E8D57u, c2, hi1, lo1);
        const std::uint32_t n0 = hi1 ^ c1 ^ k0;
        const std::uint32_t n1 = lo1;
        const std::uint32_t n2 = hi0 ^ c3 ^ k1;
        const std::uint32_t n3 = lo0;
        c0 = n0; c1 = n1; c2 = n2; c3 = n3;
        k0 += 0x9E3779B9u;
        k1 += 0xBB67AE85u;
    }
    return Block{{c0, c1, c2, c3}};
}

inline std::uint64_t join(std::uint32_t lo, std::uint32_t hi) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// uniform in (0,1] from 53 bits — safe under log().
inline double u53_open0(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// uniform in [0,1)
inline double u53(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Standard normal for counter (stream, index); one Box-Muller cosine
/// branch per Philox block.
inline double gaussian(std::uint64_t seed, std::uint32_t stream, std::uint64_t index) {
    const detail::Block b = detail::philox(seed, static_cast<std::uint32_t>(index),
                                           static_cast<std::uint32_t>(index >> 32),
                                           stream, 0x5bd1e995u);
    const double u1 = detail::u53_open0(detail::join(b.v[0], b.v[1]));
    const double u2 = detail::u53(detail::join(b.v[2], b.v[3]));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// Uniform in [lo, hi) for counter (stream, index).
inline double uniform(std::uint64_t seed, std::uint32_t stream, std::uint64_t index,
                      double lo = 0.0, double hi = 1.0) {
    const detail::Block b = detail::philox(seed, static_cast<std::uint32_t>(index),
                                           static_cast<std::uint32_t>(index >> 32),
                                           stream, 0x7f4a7c15u);
    return lo + (hi - lo) * detail::u53(detail::join(b.v[0], b.v[1]));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed for (replicate r, path m) under a master seed. Stable across
/// releases: splitmix64 chain documented in the README.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate,
                                 std::uint64_t path) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ (0x9E3779B97F4A7C15ull * (replicate + 1)));
    h = splitmix64(h ^ (0xC2B2AE3D27D4EB4Full * (path + 1)));
    return h;
}

}  // namespace logconvex::rng

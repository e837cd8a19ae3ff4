#pragma once

#include <cmath>
#include <cstdint>

namespace trellisml {

// Counter-based randomness: every draw is a pure function of
// (seed, trial, time index, coordinate), so trials can run in any order or
// on any number of threads and still produce identical streams.

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t counter_hash(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
    uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ c);
    return splitmix64(h);
}

// 53-bit mantissa uniform in (0, 1].
inline double unit_open(uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

struct TrialRng {
    uint64_t seed = 0;
    uint64_t trial = 0;

    // Standard normal via Box-Muller on two independent counter draws.
    double gaussian(uint64_t d, uint64_t coord) const {
        const uint64_t key = d * 0x100000001ULL + coord;
        const double u1 = unit_open(counter_hash(seed, trial, key, 0x67617573ULL));
        const double u2 = unit_open(counter_hash(seed, trial, key, 0x6e6f726dULL));
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    uint64_t uniform_bits(uint64_t d, uint64_t salt) const {
        return counter_hash(seed, trial, d, salt);
    }

    // Uniform integer in [0, bound). Modulo bias is ~bound/2^64, irrelevant here.
    uint64_t uniform_below(uint64_t bound, uint64_t d, uint64_t salt) const {
        return uniform_bits(d, salt) % bound;
    }
};

}  // namespace trellisml

#pragma once

// Seeded, portable randomness. std::mt19937_64's raw output sequence is
// fixed by the standard; the bounded draws below avoid std::uniform_*
// distributions, whose outputs vary across library implementations.

#include <expsum/ring.hpp>

#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

namespace expsum {

// Unbiased draw from [0, bound) by rejection.
inline u64 uniform_below(std::mt19937_64& gen, u64 bound) {
    if (bound == 0) throw std::domain_error("uniform_below: zero bound");
    const u64 limit = bound * (~u64(0) / bound);
    u64 r = gen();
    while (r >= limit) r = gen();
    return r % bound;
}

// Floyd's sampling: `count` distinct values from [0, modulus), sorted.
inline std::vector<u64> sample_distinct(std::mt19937_64& gen, u64 count,
                                        u64 modulus) {
    if (count > modulus)
        throw std::domain_error("sample_distinct: count exceeds range");
    std::set<u64> chosen;
    for (u64 j = modulus - count; j < modulus; ++j) {
        const u64 t = uniform_below(gen, j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    return {chosen.begin(), chosen.end()};
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& gen) {
    return double(gen() >> 11) * 0x1.0p-53;
}

// SplitMix64 finalizer; used to derive independent per-cell seeds from a
// master seed without correlating the streams.
inline u64 mix_seed(u64 a, u64 b) {
    u64 z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace expsum

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "dfderiv/scalar.hpp"

namespace dfderiv {

/** Finite stand-in for universal quantifiers over symbolic carriers. */
struct ProbeSpec {
    std::size_t max_degree = 8;
    std::vector<Rational> coefficients{-2, -1, 0, 1, 2};
    std::size_t random_samples = 200;
    std::uint64_t seed = 0x5eed;
};

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/** Deterministic generator keyed by seed, carrier signature and purpose tag. */
inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::string_view signature, std::string_view purpose) {
    return std::mt19937_64(splitmix64(seed ^ fnv1a(signature) ^ (fnv1a(purpose) * 31)));
}

} // namespace dfderiv

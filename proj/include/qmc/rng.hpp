#pragma once

#include <cstdint>
#include <random>

namespace qmc {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 42;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent generator for task `stream` under `master`.
inline Rng make_stream(std::uint64_t master, std::uint64_t stream) {
    return Rng(splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)));
}

/// Two-level stream derivation, e.g. (strike index, trial index).
inline Rng make_stream(std::uint64_t master, std::uint64_t outer, std::uint64_t inner) {
    return make_stream(splitmix64(master ^ splitmix64(outer)), inner);
}

} // namespace qmc

// Seeded, cross-run-stable randomness helpers.
//
// std::shuffle and the <random> distributions are implementation-defined, so
// anything that must reproduce byte-identically (splits, folds, oracle bias
// draws) goes through these instead.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace vizpref {

/// splitmix64 finalizer; good avalanche, stable everywhere.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// FNV-1a over bytes, mixed; keyed by seed. Stable across runs and platforms.
inline std::uint64_t hash64(std::uint64_t seed, std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull ^ mix64(seed);
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return mix64(h);
}

/// Uniform double in [0, 1) derived from a 64-bit hash.
inline double unit_from_hash(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Deterministic Fisher-Yates over indices [0, n). mt19937_64's raw output is
/// specified by the standard; only the distributions are not, so we reduce by
/// modulo ourselves (bias is irrelevant at these sizes).
inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

} // namespace vizpref

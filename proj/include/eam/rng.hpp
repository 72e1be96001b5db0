#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace eam {

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives an independent child seed from a master seed and a path of stream
/// indices, e.g. derive_seed(master, {kSplitStream, iteration}). The result
/// depends only on the arguments, never on call order.
constexpr Seed derive_seed(Seed master, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(master);
    for (std::uint64_t p : path) {
        h = mix64(h ^ mix64(p + 0x632BE59BD9B4E019ULL));
    }
    return h;
}

inline Rng make_rng(Seed seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Rng(seq);
}

}  // namespace eam

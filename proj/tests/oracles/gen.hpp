#pragma once

// Seeded generators shared by the property tests and the acceptance suite.

#include <cstdint>
#include <random>
#include <vector>

#include "mlidl/wordmem/wordmem.hpp"

namespace mlidl::test {

using Rng = std::mt19937;

inline std::uint32_t any_word(Rng& rng) {
    // Bias towards boundary values now and then.
    static constexpr std::uint32_t edges[] = {0u, 1u, 0x7FFFFFFFu, 0x80000000u, 0xFFFFFFFFu};
    if (rng() % 8 == 0) return edges[rng() % 5];
    return static_cast<std::uint32_t>(rng());
}

inline std::vector<std::uint32_t> any_words(Rng& rng, std::size_t lo, std::size_t hi) {
    std::size_t n = lo + rng() % (hi - lo + 1);
    std::vector<std::uint32_t> ws(n);
    for (auto& w : ws) w = any_word(rng);
    return ws;
}

/// A random pure `word list -> word` function: fold with one of a few
/// operators over args scaled by per-position coefficients.
struct RandomFn {
    int op = 0;
    std::uint32_t seed = 0;
    std::vector<std::uint32_t> coef;

    std::uint32_t operator()(const std::vector<std::uint32_t>& args) const {
        std::uint32_t acc = seed;
        for (std::size_t i = 0; i < args.size(); ++i) {
            std::uint32_t term = args[i] * coef[i % coef.size()];
            switch (op) {
            case 0: acc += term; break;
            case 1: acc ^= term; break;
            case 2: acc = acc * 31u + term; break;
            default: acc = (acc << 3 | acc >> 29) - term; break;
            }
        }
        return acc;
    }
};

inline RandomFn any_fn(Rng& rng) {
    RandomFn f;
    f.op = static_cast<int>(rng() % 4);
    f.seed = any_word(rng);
    f.coef = any_words(rng, 1, 4);
    return f;
}

}  // namespace mlidl::test

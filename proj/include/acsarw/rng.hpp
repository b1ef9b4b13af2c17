#pragma once

// Deterministic randomness. A master seed fans out into independent per-round
// per-purpose streams via splitmix64 mixing, so every round is replayable
// bit-exactly and reordering one phase never perturbs another. Uniform field
// elements come from rejection sampling on raw mt19937_64 output —
// std::uniform_int_distribution is implementation-defined and would break
// cross-platform golden traces.

#include <cstdint>
#include <random>

#include "acsarw/field.hpp"

namespace acsarw {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stable sub-seed for (master seed, purpose stream, round index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t t) {
    return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ t);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // Uniform in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw UsageError("Rng::below(0)");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % bound;
    }

    Fe uniform(const Field& f) { return f.make(below(f.modulus())); }

    std::vector<Fe> uniform_vec(const Field& f, std::size_t n) {
        std::vector<Fe> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(uniform(f));
        return out;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace acsarw

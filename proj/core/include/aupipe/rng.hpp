#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace aupipe {

// Deterministic random stream (xoshiro256++ seeded via splitmix64).
//
// Every random decision in the pipeline flows through this class so that runs
// are reproducible bit-for-bit from a single seed, independent of the standard
// library's distribution implementations. State is a handful of words and can
// be serialized into checkpoints.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform double in [0, 1), 53 bits of randomness.
    double uniform();

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    // Unbiased uniform integer in [0, n); n must be > 0.
    std::uint64_t uniform_int(std::uint64_t n);

    bool bernoulli(double p);

    // Standard normal via Box-Muller; second value of each pair is cached.
    double normal();

    // Full engine state, including the Box-Muller cache.
    std::array<std::uint64_t, 6> state() const;
    void restore(const std::array<std::uint64_t, 6>& st);

private:
    std::array<std::uint64_t, 4> s_{};
    bool has_cached_ = false;
    double cached_ = 0.0;
};

// Labeled seed derivation: one global seed fans out into independent
// per-stage streams. Stage label (and optional indices) are hashed into the
// base seed so every stage can be rerun in isolation yet reproducibly.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);
std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::uint64_t a,
                          std::uint64_t b);

}  // namespace aupipe

#pragma once

#include <cstdint>
#include <random>

namespace emrefine {

/// Seeded random stream used by every sampler.
///
/// The engine is std::mt19937_64 seeded through std::seed_seq from the
/// 64-bit seed split into two words plus a 64-bit stream id (also split).
/// Distinct stream ids give independent, reproducible streams from one user
/// seed, so parallel augmentation of (seed, pair index) is deterministic.
/// Bit-reproducibility holds within one build of the standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed),
                          static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    /// Uniform draw on [lo, hi).
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    /// Standard normal draw.
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

    /// Raw 64-bit draw, used to derive seeds for nested samplers.
    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer on [lo, hi].
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(engine_);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace emrefine

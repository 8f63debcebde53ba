#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace feedsim {

/// Seeded generator with distributions defined here rather than by the
/// standard library, so a seed reproduces the same stream on every toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) from the top 53 bits of one engine draw.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n); consumes one draw.
    std::size_t index(std::size_t n) {
        auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return k < n ? k : n - 1;
    }

    /// Box-Muller, always consuming exactly two draws.
    double normal(double mean, double stddev);

private:
    std::mt19937_64 engine_;
};

}  // namespace feedsim

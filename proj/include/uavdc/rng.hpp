#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace uavdc {

/// Seeded random stream. The engine is mt19937_64 (sequence fixed by the
/// standard); the distributions are implemented here so draws are identical
/// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n). Lemire-style rejection keeps it unbiased.
    std::uint64_t index(std::uint64_t n);

    /// Box-Muller normal deviate.
    double normal(double mean = 0.0, double stddev = 1.0);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// Named sub-stream of a master seed: each component draws from its own
/// stream so it can be re-seeded independently of the others.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0);

}  // namespace uavdc

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace thermovitals {

/// Deterministic random source. std::mt19937_64 is fully specified by the
/// standard, but the std distributions are not, so the draws below are
/// implemented directly and reproduce bit-identically on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    /// Uniform double in (0, 1).
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    /// Uniform integer in [0, bound). bound must be > 0.
    uint64_t uniform_int(uint64_t bound) { return engine_() % bound; }

    /// Standard normal via Box-Muller, one draw per call (two uniforms
    /// consumed, no cached spare, so the stream position is predictable).
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace thermovitals

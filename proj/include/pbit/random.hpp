#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pbit {

// SplitMix64 output mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    return mix64(state);
}

// Child seed derivation. Every independent stream (per node, per cell, per
// restart, per batch item) gets its seed from the master seed through this,
// so results never depend on update order or worker count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) {
    return mix64(master + 0x9E3779B97F4A7C15ull * (salt + 1));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt_a, std::uint64_t salt_b) {
    return derive_seed(derive_seed(master, salt_a), salt_b);
}

// Stream salts, fixed so that seed derivations are stable across builds.
inline constexpr std::uint64_t kSaltNodeStream = 0x4E4F4445; // per-node ideal streams
inline constexpr std::uint64_t kSaltLfsrBank = 0x4C465352;   // per-cell register seeds
inline constexpr std::uint64_t kSaltScheduler = 0x53434845;  // permutation schedule
inline constexpr std::uint64_t kSaltInitState = 0x494E4954;  // random initial states

inline double u64_to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53; // [0, 1)
}

// Deterministic, portable uniform/normal stream.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    double next_unit() { return u64_to_unit(next_u64()); } // [0, 1)

    double next_pm1() { return 2.0 * next_unit() - 1.0; } // [-1, 1)

    int next_sign() { return (next_u64() >> 63) ? +1 : -1; }

    // Unbiased integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Box-Muller pair; consumes exactly two words.
    void next_normal_pair(double& z0, double& z1) {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        z0 = r * std::cos(a);
        z1 = r * std::sin(a);
    }

private:
    std::uint64_t state_;
};

} // namespace pbit

#pragma once

// Deterministic random fields: coefficients |k|^{-q} with random phases,
// Hermitian-symmetric, Nyquist-free, zero mean. The generator is hand-rolled
// (splitmix64 + Box-Muller) so results are bit-identical for a given
// (seed, index) on every platform.

#include <cstdint>

#include "ins/field.hpp"
#include "ins/spectral.hpp"

namespace ins {

struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t s) : state(s) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // uniform in (0, 1]
    double uniform() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }
    void gaussian_pair(double& g1, double& g2);
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 s(seed * 0x9E3779B97F4A7C15ull ^ (index + 1) * 0xD1B54A32D192ED03ull);
    return s.next();
}

// zero-mean scalar field, modes 1 <= |k|, |k_a| < n/2, |zhat_k| ~ |k|^{-q}
ScalarField random_spectral_field(Grid g, double q, std::uint64_t seed);

// Leray projection of a random vector field (divergence-free by construction)
VectorField random_divfree_velocity(Grid g, double q, std::uint64_t seed);

}  // namespace ins

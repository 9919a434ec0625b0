#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "movepoly/types.hpp"

namespace movepoly {

/// Seeded source of uniform points in Euclidean balls (rejection from the
/// cube). The bit-level sequence depends only on the seed: std::mt19937_64
/// is fully specified and doubles are built from the top 53 bits by hand.
class BallSampler {
public:
    explicit BallSampler(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream derived from a base seed and a purpose tag.
    static BallSampler stream(std::uint64_t seed, std::string_view tag);

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in the closed unit ball of R^dim.
    Vector unit_ball(Eigen::Index dim);

    Vector in_ball(const Vector& center, double radius) { return center + radius * unit_ball(center.size()); }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace movepoly

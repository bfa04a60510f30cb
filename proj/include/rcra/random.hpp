#ifndef RCRA_RANDOM_HPP_
#define RCRA_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace rcra {

/// Seeded 64-bit engine plus the few draws the simulator needs.
///
/// Draws are computed from raw engine output rather than through the
/// <random> distributions so a seed reproduces the same run on any
/// standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_{seed} {}

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace rcra

#endif  // RCRA_RANDOM_HPP_

#pragma once

#include <cstdint>
#include <random>

namespace ale {

/// Deterministic RNG with platform-stable output (mt19937_64 bit stream plus
/// explicit double conversion; no implementation-defined distributions).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Substream for (seed, index), decorrelated via splitmix64 mixing.
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
        x = mix(x);
        x = mix(x + 0xBF58476D1CE4E5B9ULL);
        return Rng(x);
    }

    std::uint64_t bits() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller (explicit formula, platform-stable).
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586477 * u2;
        spare_ = rad * std::sin(ang);
        have_spare_ = true;
        return rad * std::cos(ang);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace ale

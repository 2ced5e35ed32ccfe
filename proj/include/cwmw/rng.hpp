#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace cwmw {

// splitmix64 finalizer; used for seed mixing and derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stable seed derivation: derive_seed(master, i) feeds child streams that
// are independent of each other and of the parent. The formula is fixed so
// that reports are replayable: splitmix64(splitmix64(master) ^ (i + 1)).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ (index + 1));
}

// Random stream with fully specified output functions. The engine is
// std::mt19937_64 (bit-exact per the standard); all variate mappings are
// implemented here rather than with std:: distributions, whose output is
// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0,1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased uniform integer in [0, n). Lemire multiply-shift with rejection.
    std::uint64_t uniform_below(std::uint64_t n) {
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (-n) % n;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Standard normal via Box-Muller; the second variate of each pair is
    // cached and returned on the next call.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    // Chi-square with one degree of freedom: the square of a standard
    // normal. A draw of exactly zero is rejected so the value is safe to
    // divide by.
    double chi_square_1() {
        double z = normal();
        while (z == 0.0) z = normal();
        return z * z;
    }

private:
    std::mt19937_64 engine_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

} // namespace cwmw

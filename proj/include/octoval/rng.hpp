#pragma once

#include "octoval/common.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace octoval {

/// Seeded random stream with reproducible output. The transforms are done
/// by hand (not via std:: distributions, whose output is
/// implementation-defined) so that a (seed, call sequence) pair pins the
/// exact sample values.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent sub-stream: hashes (seed, index) through SplitMix64.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return Rng(z);
    }

    std::uint64_t bits() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return double(bits() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; caches the second deviate.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * kPi * u2);
        have_cached_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    /// Uniform direction on the unit sphere of R^n (n Gaussians, normalized).
    template <int N>
    Eigen::Matrix<double, N, 1> sphere() {
        Eigen::Matrix<double, N, 1> v;
        double n2 = 0.0;
        do {
            for (int i = 0; i < N; ++i) v[i] = normal();
            n2 = v.squaredNorm();
        } while (n2 == 0.0);
        return v / std::sqrt(n2);
    }

    /// Uniform point in the unit ball of R^n.
    template <int N>
    Eigen::Matrix<double, N, 1> ball() {
        const Eigen::Matrix<double, N, 1> dir = sphere<N>();
        const double r = std::pow(uniform(), 1.0 / double(N));
        return r * dir;
    }

private:
    std::mt19937_64 engine_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

/// Halton low-discrepancy sequence (one value per dimension per index).
inline double halton(std::uint64_t index, std::uint32_t base) {
    double f = 1.0;
    double r = 0.0;
    std::uint64_t i = index;
    while (i > 0) {
        f /= double(base);
        r += f * double(i % base);
        i /= base;
    }
    return r;
}

inline constexpr std::array<std::uint32_t, 17> kHaltonPrimes = {
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59};

} // namespace octoval

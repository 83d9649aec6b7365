#pragma once

#include <cmath>
#include <cstdint>

namespace flagsim {

/// Deterministic splitmix64 generator. All randomness in the library flows
/// through this type so that results are reproducible across platforms and
/// standard-library versions (std distributions are not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller (two uniforms per call, no cached spare).
    double normal() {
        double u1 = uniform();
        const double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Derive an independent stream for sub-case `k` of a seeded suite.
    static std::uint64_t stream(std::uint64_t seed, std::uint64_t k) {
        Rng r(seed * 0x9e3779b97f4a7c15ULL + k + 1);
        return r.next_u64();
    }

private:
    std::uint64_t state_;
};

}  // namespace flagsim

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sdgf {

// splitmix64 step; also used as a stateless lattice hash for value noise.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash2(uint64_t seed, int64_t a, int64_t b) {
    uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64(h ^ static_cast<uint64_t>(a));
    h = splitmix64(h ^ static_cast<uint64_t>(b));
    return h;
}

inline double to_unit(uint64_t bits) {
    // top 53 bits -> [0,1)
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Deterministic RNG: mt19937_64 stream with hand-rolled distributions so
/// outputs are identical across standard-library implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    double uniform() { return to_unit(eng_()); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller, cosine branch only; draws two uniforms per call.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace sdgf

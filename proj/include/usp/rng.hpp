#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace usp {

// splitmix64 finalizer, used to derive independent child seeds from a master seed.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hierarchical seed derivation: every consumer of randomness gets its own
// stream addressed by a path of integers under the master seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(base);
    for (std::uint64_t p : path) {
        s = mix64(s ^ mix64(p));
    }
    return s;
}

// Fixed stream addresses under the master seed.
namespace seed_tags {
constexpr std::uint64_t net_init = 1;
constexpr std::uint64_t trainer = 2;
constexpr std::uint64_t split = 3;
constexpr std::uint64_t subsample = 4;
constexpr std::uint64_t noise = 5;
constexpr std::uint64_t grape = 6;
}  // namespace seed_tags

// Deterministic random source. All distributions are built on the raw
// mt19937_64 output so streams are reproducible across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    // uniform double in [0, 1)
    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased integer in [0, n), rejection sampled
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = bits();
        while (v >= limit) v = bits();
        return v % n;
    }

    // Box-Muller; consumes exactly two uniforms per draw
    double normal(double mean = 0.0, double stddev = 1.0) {
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace usp

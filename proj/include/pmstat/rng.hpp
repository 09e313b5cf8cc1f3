#pragma once

// Seeded randomness with draws defined here rather than by the standard
// library distributions, whose outputs differ between implementations.

#include <cstddef>
#include <cstdint>
#include <random>

namespace pmstat {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Uniform integer in [0, n), n > 0, by rejection.
    std::size_t below(std::size_t n) {
        const std::uint64_t m = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % m;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return static_cast<std::size_t>(v % m);
    }

    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

}  // namespace pmstat

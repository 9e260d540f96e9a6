#pragma once

#include <cstdint>
#include <random>

namespace pmv {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed for clip `index` under `master_seed`. Order independent, so clips can be
// generated in any order or in parallel.
std::uint64_t derive_clip_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

// Deterministic random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; every distribution is implemented here
// rather than through <random> distributions, whose results vary by library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    // Inclusive bounds.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    bool bernoulli(double p) { return uniform01() < p; }
    double normal();
    double gamma(double shape);
    double beta(double a, double b);

private:
    std::mt19937_64 engine_;
};

}  // namespace pmv

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace cellcast {

/// SplitMix64 finalizer. Used only to derive child seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Child seed for stream `index` under `parent`:
/// splitmix64(parent ^ splitmix64(index + 0x9E3779B97F4A7C15)).
/// Derivation chains (master -> series -> component) are documented in the README.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept;

/// Pinned random stream: std::mt19937_64 (whose output sequence is fixed by
/// the C++ standard) with hand-written variate transforms, so that every
/// draw is reproducible across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);
    /// Uniform integer in [0, n); n must be > 0. Rejection-free multiply-shift
    /// on the top 53 bits, adequate for n far below 2^53.
    std::size_t uniform_index(std::size_t n);
    /// Standard normal by Box-Muller; the second variate is cached.
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    /// Exponential with the given mean (mean >= 0; mean == 0 yields 0).
    double exponential(double mean);
    /// Poisson count by Knuth's product method. Intended for small lambda.
    std::uint64_t poisson(double lambda);

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

} // namespace cellcast

#pragma once

#include <cstdint>

namespace emholo {

/// Counter-based generator: output i of stream s under seed k is
/// splitmix64_finalize(key(k, s) + i * 0x9E3779B97F4A7C15).
///
/// Every pixel draws from its own stream (s = pixel index), so sampling
/// order and thread count cannot change the result. Pure 64-bit integer
/// arithmetic; identical on every platform.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t next() noexcept;

    /// Uniform double in [0, 1) built from the top 53 bits.
    double uniform() noexcept;

    static std::uint64_t mix(std::uint64_t z) noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Poisson variate with the given mean.
///
/// mean < 10: inversion by sequential search of the CDF.
/// mean >= 10: PTRS transformed rejection (Hormann 1993), the same constants
/// numpy uses. Consumes a data-dependent number of draws from `rng`.
std::uint64_t sample_poisson(double mean, CounterRng& rng);

} // namespace emholo

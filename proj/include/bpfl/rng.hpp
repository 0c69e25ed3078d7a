#pragma once

#include <cstdint>
#include <gmpxx.h>

namespace bpfl {

/// Deterministic pseudo-random stream (splitmix64 core). Not cryptographic;
/// used for simulation, tests and key-generation candidates at desk scale.
/// Every consumer takes an explicit Rng so runs are reproducible from seeds.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Independent child stream; (seed, tag) -> stream is injective in practice.
    Rng child(std::uint64_t tag) const;

    std::uint64_t next_u64();

    /// Uniform in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 random bits.
    double unit();

    /// Gaussian via Box-Muller (platform-stable given identical libm).
    double normal(double mean = 0.0, double stddev = 1.0);

    /// Uniform integer with at most `bits` bits.
    mpz_class mpz_bits(unsigned bits);

    /// Uniform integer in [0, bound) by rejection. bound must be positive.
    mpz_class mpz_below(const mpz_class& bound);

private:
    std::uint64_t state_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace bpfl

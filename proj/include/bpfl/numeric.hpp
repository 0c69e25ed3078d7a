#pragma once

#include <gmpxx.h>

#include "bpfl/rng.hpp"

namespace bpfl {

/// Miller-Rabin with `rounds` random bases. Error probability <= 4^-rounds.
bool is_probable_prime(const mpz_class& n, unsigned rounds, Rng& rng);

/// Random prime with exactly `bits` bits and the top two bits set
/// (so products of two such primes keep their full width).
mpz_class random_prime(unsigned bits, unsigned mr_rounds, Rng& rng);

} // namespace bpfl

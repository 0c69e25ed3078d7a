#pragma once

#include <cstdint>

#include <gmpxx.h>

#include "bpfl/rng.hpp"

namespace bpfl {

struct PaillierPublicKey {
    mpz_class n;  ///< modulus N = q1*q2
    mpz_class n2; ///< N^2
    mpz_class g;  ///< generator, fixed to N+1
    std::uint64_t key_tag = 0; ///< fingerprint for key-mismatch detection
};

struct PaillierSecretKey {
    mpz_class lambda; ///< lcm(q1-1, q2-1)
    mpz_class mu;     ///< lambda^{-1} mod N
};

struct PaillierKeypair {
    PaillierPublicKey pk;
    PaillierSecretKey sk;
};

struct PaillierCiphertext {
    mpz_class value; ///< in [0, N^2)
    std::uint64_t key_tag = 0;
};

/// Generates a keypair with an N of exactly `kappa_bits` bits.
/// Throws ConfigError if kappa_bits < 512 or odd.
PaillierKeypair paillier_keygen(unsigned kappa_bits, Rng& rng);

/// Probabilistic encryption of m in [0, N); throws std::out_of_range otherwise.
PaillierCiphertext paillier_encrypt(const PaillierPublicKey& pk, const mpz_class& m, Rng& rng);

mpz_class paillier_decrypt(const PaillierPublicKey& pk, const PaillierSecretKey& sk,
                           const PaillierCiphertext& c);

/// Dec(add(c1, c2)) = m1 + m2 mod N. Throws std::invalid_argument on key mismatch.
PaillierCiphertext paillier_add(const PaillierPublicKey& pk, const PaillierCiphertext& c1,
                                const PaillierCiphertext& c2);

/// Dec(scalar_mul(c, l)) = m * l mod N, for l >= 0.
PaillierCiphertext paillier_scalar_mul(const PaillierPublicKey& pk, const PaillierCiphertext& c,
                                       const mpz_class& l);

} // namespace bpfl

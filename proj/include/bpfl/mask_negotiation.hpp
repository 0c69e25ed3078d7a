#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bpfl/hash.hpp"
#include "bpfl/paillier.hpp"

namespace bpfl {

/// One client's contribution to the mask seed: Enc(pk, s_i) with
/// s_i uniform in [0, 2^128).
struct SeedShare {
    std::uint32_t client_id = 0;
    PaillierCiphertext encrypted_seed;
};

/// The shared random vector r, a pure function of (seed, dim, field).
struct MaskVector {
    std::vector<Fe> r;
    mpz_class seed;
};

inline constexpr unsigned kSeedBits = 128;

SeedShare client_share(std::uint32_t client_id, const PaillierPublicKey& pk, Rng& rng);

/// Homomorphic sum of all shares; the server learns nothing but ciphertexts.
/// Throws ProtocolError on an empty share list.
PaillierCiphertext server_aggregate_seeds(const PaillierPublicKey& pk,
                                          std::span<const SeedShare> shares);

/// Deterministic expansion: r_j = AlgebraicHash([s mod p, j]).
MaskVector expand_mask(const Field& field, const AlgebraicHashParams& hash, const mpz_class& seed,
                       std::size_t dim);

} // namespace bpfl

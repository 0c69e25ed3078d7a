#include "bpfl/mask_negotiation.hpp"

#include "bpfl/errors.hpp"

namespace bpfl {

SeedShare client_share(std::uint32_t client_id, const PaillierPublicKey& pk, Rng& rng) {
    mpz_class seed = rng.mpz_bits(kSeedBits);
    return SeedShare{client_id, paillier_encrypt(pk, seed, rng)};
}

PaillierCiphertext server_aggregate_seeds(const PaillierPublicKey& pk,
                                          std::span<const SeedShare> shares) {
    if (shares.empty()) throw ProtocolError("mask negotiation: no seed shares");
    PaillierCiphertext acc = shares.front().encrypted_seed;
    if (acc.key_tag != pk.key_tag)
        throw std::invalid_argument("mask negotiation: share under a different key");
    for (std::size_t i = 1; i < shares.size(); ++i) {
        acc = paillier_add(pk, acc, shares[i].encrypted_seed);
    }
    return acc;
}

MaskVector expand_mask(const Field& field, const AlgebraicHashParams& hash, const mpz_class& seed,
                       std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("expand_mask: dimension must be >= 1");
    MaskVector mv;
    mv.seed = seed;
    mv.r.reserve(dim);
    Fe seed_elem = field.from_mpz(seed);
    for (std::size_t j = 0; j < dim; ++j) {
        std::array<Fe, 2> absorb{seed_elem, field.from_u64(j)};
        mv.r.push_back(algebraic_hash(field, hash, absorb));
    }
    return mv;
}

} // namespace bpfl

#include <doctest.h>

#include "bpfl/errors.hpp"
#include "bpfl/mask_negotiation.hpp"
#include "stats.hpp"

using namespace bpfl;

namespace {
PaillierKeypair shared_keypair() {
    Rng rng(31337);
    return paillier_keygen(512, rng);
}
} // namespace

TEST_CASE("client shares stay in the seed domain and decrypt to their seed") {
    PaillierKeypair kp = shared_keypair();
    Rng rng(1);
    SeedShare share = client_share(1, kp.pk, rng);
    mpz_class seed = paillier_decrypt(kp.pk, kp.sk, share.encrypted_seed);
    CHECK(seed < (mpz_class(1) << kSeedBits));
    // deterministic under fixed randomness
    Rng rng2(1);
    SeedShare again = client_share(1, kp.pk, rng2);
    CHECK(paillier_decrypt(kp.pk, kp.sk, again.encrypted_seed) == seed);
    // independent clients draw distinct seeds
    Rng rng3(2);
    SeedShare other = client_share(2, kp.pk, rng3);
    CHECK(paillier_decrypt(kp.pk, kp.sk, other.encrypted_seed) != seed);
}

TEST_CASE("server aggregation decrypts to the seed sum") {
    PaillierKeypair kp = shared_keypair();
    Rng rng(5);
    auto enc = [&](unsigned long v) {
        return SeedShare{0, paillier_encrypt(kp.pk, mpz_class(v), rng)};
    };
    std::vector<SeedShare> shares{enc(10), enc(20), enc(12)};
    CHECK(paillier_decrypt(kp.pk, kp.sk, server_aggregate_seeds(kp.pk, shares)) == 42);

    std::vector<SeedShare> single{enc(7)};
    CHECK(paillier_decrypt(kp.pk, kp.sk, server_aggregate_seeds(kp.pk, single)) == 7);

    CHECK_THROWS_AS(server_aggregate_seeds(kp.pk, {}), ProtocolError);
}

TEST_CASE("n=50 shares: aggregate equals the plaintext-sum oracle") {
    PaillierKeypair kp = shared_keypair();
    Rng rng(7);
    std::vector<SeedShare> shares;
    mpz_class plain_sum = 0;
    for (std::uint32_t i = 1; i <= 50; ++i) {
        Rng client_rng = rng.child(i);
        SeedShare share = client_share(i, kp.pk, client_rng);
        Rng replay = rng.child(i);
        plain_sum += replay.mpz_bits(kSeedBits); // oracle: regenerate the seed
        shares.push_back(std::move(share));
    }
    mpz_class sum = paillier_decrypt(kp.pk, kp.sk, server_aggregate_seeds(kp.pk, shares));
    CHECK(sum == plain_sum % kp.pk.n);
    CHECK(plain_sum < kp.pk.n); // 50 seeds of 128 bits never wrap a 512-bit N
}

TEST_CASE("expand_mask is a deterministic pure function of (seed, dim, field)") {
    Field f(bn254_scalar_params());
    AlgebraicHashParams hp = make_hash_params(f);
    MaskVector a = expand_mask(f, hp, mpz_class("123456789123456789"), 3);
    MaskVector b = expand_mask(f, hp, mpz_class("123456789123456789"), 3);
    CHECK(a.r.size() == 3);
    CHECK(a.r == b.r);
    MaskVector c = expand_mask(f, hp, mpz_class("123456789123456790"), 3);
    CHECK(a.r != c.r);
    CHECK_THROWS_AS(expand_mask(f, hp, 1, 0), std::invalid_argument);
}

TEST_CASE("expanded coordinates pass chi-square uniformity on the 61-bit field") {
    Field f(test_field_61_params());
    AlgebraicHashParams hp = make_hash_params(f);
    const std::size_t buckets = 256;
    const std::size_t trials = 10000;
    std::vector<std::size_t> counts(buckets, 0);
    Rng rng(99);
    mpz_class bucket_width = (f.modulus() + buckets - 1) / buckets;
    for (std::size_t t = 0; t < trials; ++t) {
        MaskVector mv = expand_mask(f, hp, rng.mpz_bits(kSeedBits), 2);
        for (const Fe& v : mv.r) {
            mpz_class idx = f.to_mpz(v) / bucket_width;
            counts[idx.get_ui()] += 1;
        }
    }
    double p = teststats::uniform_chi2_pvalue(counts, trials * 2);
    CHECK(p > 0.01);
}

#include <doctest.h>

#include "bpfl/hash.hpp"

using namespace bpfl;

TEST_CASE("empty input hashes to zero; single elements pass one permutation") {
    Field f(bn254_scalar_params());
    AlgebraicHashParams hp = make_hash_params(f);
    CHECK(algebraic_hash(f, hp, {}) == f.zero());
    Fe a = f.from_u64(12345);
    std::array<Fe, 1> one_elem{a};
    CHECK(algebraic_hash(f, hp, one_elem) == hash_permutation(f, hp, a));
}

TEST_CASE("round constants are reproducible from the seed string alone") {
    Field f(bn254_scalar_params());
    AlgebraicHashParams a = make_hash_params(f, 11, "bpfl/permutation/v1");
    AlgebraicHashParams b = make_hash_params(f, 11, "bpfl/permutation/v1");
    CHECK(a.round_constants == b.round_constants);
    AlgebraicHashParams other = make_hash_params(f, 11, "different-seed");
    CHECK(a.round_constants != other.round_constants);
    CHECK(a.exponent == f.hash_exponent());
    CHECK(a.round_constants.size() == 11);
}

TEST_CASE("determinism and input sensitivity") {
    Field f(bn254_scalar_params());
    AlgebraicHashParams hp = make_hash_params(f);
    Rng rng(404);
    std::vector<Fe> msg(8);
    for (Fe& x : msg) x = f.sample(rng);
    Fe h1 = algebraic_hash(f, hp, msg);
    Fe h2 = algebraic_hash(f, hp, msg);
    CHECK(h1 == h2);
    msg[3] = f.add(msg[3], f.one());
    CHECK(algebraic_hash(f, hp, msg) != h1);
}

TEST_CASE("single-bit flips change the output in >= 99% of trials") {
    Field f(bn254_scalar_params());
    AlgebraicHashParams hp = make_hash_params(f);
    Rng rng(808);
    int changed = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        std::array<Fe, 2> msg{f.sample(rng), f.sample(rng)};
        Fe before = algebraic_hash(f, hp, msg);
        // flip one low bit of one element
        std::size_t which = rng.below(2);
        unsigned bit = static_cast<unsigned>(rng.below(64));
        mpz_class v = f.to_mpz(msg[which]);
        mpz_combit(v.get_mpz_t(), bit);
        msg[which] = f.from_mpz(v);
        if (algebraic_hash(f, hp, msg) != before) ++changed;
    }
    CHECK(changed >= trials * 99 / 100);
}

TEST_CASE("permutation works over the toy field with exponent 3") {
    Field f(toy_field_251_params());
    AlgebraicHashParams hp = make_hash_params(f, 11);
    CHECK(hp.exponent == 3);
    std::array<Fe, 3> msg{f.from_u64(1), f.from_u64(2), f.from_u64(3)};
    Fe h = algebraic_hash(f, hp, msg);
    CHECK(f.to_mpz(h) < 251);
}

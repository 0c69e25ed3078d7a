#include <doctest.h>

#include "bpfl/errors.hpp"
#include "bpfl/field.hpp"

using namespace bpfl;

TEST_CASE("named field parameters hold their stated structure") {
    for (auto params : {bn254_scalar_params(), test_field_61_params(), toy_field_251_params()}) {
        Field f(params); // constructor re-derives and checks everything
        CHECK(f.hash_exponent() == params.hash_exponent);
    }
    Field production(bn254_scalar_params());
    CHECK_NOTHROW(production.require_production_invariants());
    Field toy(toy_field_251_params());
    CHECK_THROWS_AS(toy.require_production_invariants(), ConfigError);
}

TEST_CASE("field axioms on random triples match the bignum oracle") {
    for (auto params : {bn254_scalar_params(), test_field_61_params(), toy_field_251_params()}) {
        Field f(params);
        const mpz_class& p = f.modulus();
        Rng rng(0xfeed);
        for (int i = 0; i < 10000; ++i) {
            Fe a = f.sample(rng), b = f.sample(rng), c = f.sample(rng);
            // associativity and distributivity
            CHECK(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
            CHECK(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
            CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
            if (i % 100 == 0) {
                // cross-check one sample of each op against GMP
                mpz_class am = f.to_mpz(a), bm = f.to_mpz(b);
                CHECK(f.to_mpz(f.add(a, b)) == (am + bm) % p);
                CHECK(f.to_mpz(f.mul(a, b)) == (am * bm) % p);
                CHECK(f.to_mpz(f.sub(a, b)) == ((am - bm) % p + p) % p);
                if (!f.is_zero(a)) CHECK(f.mul(a, f.inv(a)) == f.one());
            }
        }
    }
}

TEST_CASE("signed lift splits the field at p/2") {
    Field f(bn254_scalar_params());
    CHECK(f.signed_lift(f.from_u64(5)) == 5);
    CHECK(f.signed_lift(f.neg(f.from_u64(5))) == -5);
    CHECK(f.signed_lift(f.zero()) == 0);
}

TEST_CASE("roots of unity have exact order") {
    Field f(bn254_scalar_params());
    for (unsigned k : {0u, 1u, 5u, 16u, 28u}) {
        Fe w = f.root_of_unity(k);
        Fe acc = w;
        if (k == 0) {
            CHECK(w == f.one());
            continue;
        }
        for (unsigned i = 1; i < k; ++i) acc = f.sqr(acc);
        CHECK(acc != f.one()); // order exactly 2^k
        CHECK(f.sqr(acc) == f.one());
    }
    CHECK_THROWS(f.root_of_unity(29));
}

TEST_CASE("byte encoding is canonical 32-byte big-endian") {
    Field f(bn254_scalar_params());
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        Fe a = f.sample(rng);
        auto bytes = f.to_bytes(a);
        CHECK(f.from_bytes(bytes) == a);
    }
    auto too_big = f.to_bytes(f.neg(f.one()));
    // value p is non-canonical
    mpz_class p = f.modulus();
    std::array<std::uint8_t, 32> p_bytes{};
    size_t count = 0;
    std::array<std::uint8_t, 32> tmp{};
    mpz_export(tmp.data(), &count, 1, 1, 1, 0, p.get_mpz_t());
    for (size_t i = 0; i < count; ++i) p_bytes[32 - count + i] = tmp[i];
    CHECK_THROWS_AS(f.from_bytes(p_bytes), FormatError);
    CHECK_NOTHROW(f.from_bytes(too_big));
}

TEST_CASE("batch inversion equals elementwise inversion") {
    Field f(test_field_61_params());
    Rng rng(3);
    std::vector<Fe> xs(37);
    for (Fe& x : xs) {
        do {
            x = f.sample(rng);
        } while (f.is_zero(x));
    }
    std::vector<Fe> expected;
    for (const Fe& x : xs) expected.push_back(f.inv(x));
    f.batch_inv(xs);
    CHECK(xs == expected);
}

TEST_CASE("field construction rejects broken parameters") {
    FieldParams bad = bn254_scalar_params();
    bad.two_adicity = 5;
    CHECK_THROWS_AS(Field{bad}, ConfigError);
    FieldParams composite{"91", 1, 5}; // 7 * 13
    CHECK_THROWS_AS(Field{composite}, ConfigError);
    FieldParams bad_exp = bn254_scalar_params();
    bad_exp.hash_exponent = 2; // gcd(2, p-1) = 2
    CHECK_THROWS_AS(Field{bad_exp}, ConfigError);
}

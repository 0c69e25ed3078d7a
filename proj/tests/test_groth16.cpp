#include <doctest.h>

#include <chrono>
#include <cmath>

#include "bpfl/groth16.hpp"
#include "bpfl/mask_negotiation.hpp"
#include "bpfl/validity_circuit.hpp"

using namespace bpfl;

namespace {

struct TinySystem {
    Field f{bn254_scalar_params()};
    MockBilinearGroup group{f};
    std::shared_ptr<const R1CS> cs;
    std::shared_ptr<const QAP> qap;

    /// chain circuit: x0 public; x_{i+1} = x_i * x_i + x_i, last value public
    explicit TinySystem(std::size_t chain) {
        CircuitBuilder cb = CircuitBuilder::build_mode(f);
        Var in = cb.public_input(std::nullopt);
        Var out = cb.public_input(std::nullopt);
        LinComb cur(in, f.one());
        for (std::size_t i = 0; i < chain; ++i) {
            Var next = cb.mul(cur, cur);
            LinComb sum(next, f.one());
            sum.add(in, f.one());
            cur = sum;
        }
        cb.enforce(cur, LinComb(Var{0}, f.one()), LinComb(out, f.one()));
        cs = std::make_shared<const R1CS>(cb.take_r1cs());
        qap = std::make_shared<const QAP>(r1cs_to_qap(f, cs));
    }

    Witness witness(std::uint64_t x0) const {
        CircuitBuilder cb = CircuitBuilder::assign_mode(f, *cs);
        Var in = cb.public_input(f.from_u64(x0));
        // compute the chain to find the output value first
        Fe cur = f.from_u64(x0);
        std::size_t chain = cs->rows.size() - 1;
        for (std::size_t i = 0; i < chain; ++i) cur = f.add(f.mul(cur, cur), f.from_u64(x0));
        cb.public_input(cur);
        LinComb lc(in, f.one());
        for (std::size_t i = 0; i < chain; ++i) {
            Var next = cb.mul(lc, lc);
            LinComb sum(next, f.one());
            sum.add(in, f.one());
            lc = sum;
        }
        cb.enforce(lc, LinComb(Var{0}, f.one()), LinComb{});
        return cb.take_witness();
    }
};

} // namespace

TEST_CASE("QAP of the one-gate circuit x*x = y") {
    Field f(bn254_scalar_params());
    CircuitBuilder cb = CircuitBuilder::build_mode(f);
    Var y = cb.public_input(std::nullopt);
    Var x = cb.aux(std::nullopt);
    cb.enforce(LinComb(x, f.one()), LinComb(x, f.one()), LinComb(y, f.one()));
    auto cs = std::make_shared<const R1CS>(cb.take_r1cs());
    QAP qap = r1cs_to_qap(f, cs);

    CHECK(qap.target_poly().degree() == 1);
    // hand interpolation over the size-1 domain {1}: u_x = 1, w_x = 1, y_y = 1
    CHECK(qap.u_poly(2).coeffs == std::vector<Fe>{f.one()});
    CHECK(qap.w_poly(2).coeffs == std::vector<Fe>{f.one()});
    CHECK(qap.y_poly(1).coeffs == std::vector<Fe>{f.one()});

    std::vector<Fe> good{f.one(), f.from_u64(9), f.from_u64(3)};
    std::vector<Fe> bad{f.one(), f.from_u64(8), f.from_u64(3)};
    Rng rng(5);
    // t | p for the satisfied assignment, checked at random points
    Polynomial p_good = qap.p_poly(good);
    Polynomial p_bad = qap.p_poly(bad);
    Polynomial t = qap.target_poly();
    auto [q_good, r_good] = poly_divide(f, p_good, t);
    auto [q_bad, r_bad] = poly_divide(f, p_bad, t);
    CHECK(r_good.is_zero());
    CHECK_FALSE(r_bad.is_zero());
    for (int i = 0; i < 10; ++i) {
        Fe z = f.sample(rng);
        CHECK(poly_eval(f, p_good, z) == f.mul(poly_eval(f, q_good, z), poly_eval(f, t, z)));
    }
}

TEST_CASE("column evaluations match coefficient polynomials") {
    TinySystem sys(6);
    Rng rng(7);
    Fe z = sys.f.sample(rng);
    QAP::ColumnEvals cols = sys.qap->columns_at(z);
    for (std::size_t k = 0; k < sys.qap->num_vars(); ++k) {
        CHECK(cols.u[k] == poly_eval(sys.f, sys.qap->u_poly(k), z));
        CHECK(cols.w[k] == poly_eval(sys.f, sys.qap->w_poly(k), z));
        CHECK(cols.y[k] == poly_eval(sys.f, sys.qap->y_poly(k), z));
    }
}

TEST_CASE("h coefficients: exact quotient iff satisfied") {
    TinySystem sys(6);
    const Field& f = sys.f;
    Witness w = sys.witness(3);
    REQUIRE(check_satisfied(f, *sys.cs, w));
    std::vector<Fe> z = full_assignment(f, *sys.cs, w);
    std::vector<Fe> h = sys.qap->h_coefficients(z);
    Polynomial p = sys.qap->p_poly(z);
    auto [q, r] = poly_divide(f, p, sys.qap->target_poly());
    CHECK(r.is_zero());
    CHECK(poly_from(f, h).coeffs == q.coeffs);

    Witness bad = w;
    bad.io[1] = f.add(bad.io[1], f.one());
    std::vector<Fe> zb = full_assignment(f, *sys.cs, bad);
    Polynomial pb = sys.qap->p_poly(zb);
    auto rb = poly_divide(f, pb, sys.qap->target_poly()).second;
    CHECK_FALSE(rb.is_zero());
}

TEST_CASE("setup reference string has the displayed shape") {
    TinySystem sys(10);
    Rng rng(11);
    MockSetup setup = groth16_setup(sys.group, sys.qap, rng);
    std::size_t n = sys.qap->domain().size();
    CHECK(setup.pk.sigma1.s_pows.size() == n); // |{s^i}| = deg t
    CHECK(setup.pk.sigma2.s_pows.size() == n);
    CHECK(setup.pk.sigma1.t_quotients.size() == n - 1); // i = 0..deg t - 2
    CHECK(setup.pk.sigma1.io_quotients.size() == sys.qap->io_len() + 1);
    CHECK(setup.pk.sigma1.aux_quotients.size() ==
          sys.qap->num_vars() - sys.qap->io_len() - 1);
    // sigma1 s-powers really are s^i in the clear under the mock group
    const Field& f = sys.f;
    CHECK(setup.pk.sigma1.s_pows[0].v == f.one());
    CHECK(setup.pk.sigma1.s_pows[3].v == f.pow_u64(setup.toxic.s, 3));

    // fixed randomness -> bit-for-bit reproducible reference string
    Rng rng_a(99), rng_b(99);
    MockSetup a = groth16_setup(sys.group, sys.qap, rng_a);
    MockSetup b = groth16_setup(sys.group, sys.qap, rng_b);
    CHECK(a.pk.sigma1.s_pows == b.pk.sigma1.s_pows);
    CHECK(a.pk.sigma1.io_quotients == b.pk.sigma1.io_quotients);
    CHECK(a.vk.io_quotients == b.vk.io_quotients);
}

TEST_CASE("prove/verify completeness and randomization") {
    TinySystem sys(12);
    Rng rng(13);
    MockSetup setup = groth16_setup(sys.group, sys.qap, rng);
    Witness w = sys.witness(5);
    MockProof p1 = groth16_prove(sys.group, setup.pk, w, rng);
    MockProof p2 = groth16_prove(sys.group, setup.pk, w, rng);
    CHECK(groth16_verify(sys.group, setup.vk, p1, w.io));
    CHECK(groth16_verify(sys.group, setup.vk, p2, w.io));
    CHECK((p1.a == p2.a) == false); // fresh r1, r2 randomize the proof

    Witness bad = w;
    bad.aux[0] = sys.f.add(bad.aux[0], sys.f.one());
    CHECK_THROWS_AS(groth16_prove(sys.group, setup.pk, bad, rng), ProverError);
    MockProof forced = groth16_prove_unchecked(sys.group, setup.pk, bad, rng);
    CHECK_FALSE(groth16_verify(sys.group, setup.vk, forced, bad.io));
}

TEST_CASE("completeness over 10000 randomized instances across sizes") {
    Rng rng(17);
    int verified = 0;
    for (std::size_t chain : {1u, 4u, 16u, 40u}) {
        TinySystem sys(chain);
        MockSetup setup = groth16_setup(sys.group, sys.qap, rng);
        for (int trial = 0; trial < 2500; ++trial) {
            Witness w = sys.witness(rng.below(1ULL << 32));
            MockProof proof = groth16_prove(sys.group, setup.pk, w, rng);
            if (groth16_verify(sys.group, setup.vk, proof, w.io)) ++verified;
        }
    }
    CHECK(verified == 10000);
}

TEST_CASE("perturbation fuzzer: any single altered element or input fails") {
    TinySystem sys(8);
    Rng rng(19);
    MockSetup setup = groth16_setup(sys.group, sys.qap, rng);
    const Field& f = sys.f;
    for (int trial = 0; trial < 1000; ++trial) {
        Witness w = sys.witness(rng.below(1ULL << 20));
        MockProof proof = groth16_prove(sys.group, setup.pk, w, rng);
        MockProof mutated = proof;
        switch (trial % 3) {
            case 0: mutated.a.v = f.add(mutated.a.v, f.one()); break;
            case 1: mutated.b.v = f.add(mutated.b.v, f.one()); break;
            case 2: mutated.c.v = f.add(mutated.c.v, f.one()); break;
        }
        CHECK_FALSE(groth16_verify(sys.group, setup.vk, mutated, w.io));
        std::vector<Fe> pub = w.io;
        pub[trial % pub.size()] = f.add(pub[trial % pub.size()], f.one());
        CHECK_FALSE(groth16_verify(sys.group, setup.vk, proof, pub));
    }
}

TEST_CASE("oracle_verify agrees with verify on honest and adversarial instances") {
    TinySystem sys(10);
    Rng rng(23);
    MockSetup setup = groth16_setup(sys.group, sys.qap, rng);
    const Field& f = sys.f;
    for (int trial = 0; trial < 1000; ++trial) {
        Witness w = sys.witness(rng.below(1ULL << 24));
        bool adversarial = trial % 2 == 1;
        if (adversarial) w.aux[rng.below(w.aux.size())] = f.sample(rng);
        MockProof proof = adversarial ? groth16_prove_unchecked(sys.group, setup.pk, w, rng)
                                      : groth16_prove(sys.group, setup.pk, w, rng);
        CHECK(groth16_verify(sys.group, setup.vk, proof, w.io) ==
              oracle_verify(f, *sys.cs, w, w.io));
    }
    // mismatched publics are rejected by the oracle
    Witness w = sys.witness(9);
    std::vector<Fe> wrong = w.io;
    wrong[0] = f.add(wrong[0], f.one());
    CHECK_FALSE(oracle_verify(f, *sys.cs, w, wrong));
}

TEST_CASE("proof size is constant across circuit dimensions") {
    Field f(bn254_scalar_params());
    MockBilinearGroup group(f);
    AlgebraicHashParams hp = make_hash_params(f);
    Rng rng(29);
    std::size_t expected = 0;
    for (std::size_t d : {2u, 64u, 256u}) {
        auto [cs, layout] = build_validity_circuit(f, d, make_codec(f, d), hp);
        auto csp = std::make_shared<const R1CS>(std::move(cs));
        auto qap = std::make_shared<const QAP>(r1cs_to_qap(f, csp));
        MockSetup setup = groth16_setup(group, qap, rng);

        std::vector<double> w(d, 0.25);
        std::vector<Fe> a = encode_vector(f, layout.codec, w);
        MaskVector mask = expand_mask(f, hp, 5, d);
        std::vector<Fe> masked(d);
        for (std::size_t j = 0; j < d; ++j) masked[j] = f.add(a[j], mask.r[j]);
        auto [c2, e2] = encode_thresholds(f, layout.codec, d, 0.9, 1.0);
        ValidityPublicInputs pub{a, masked, e2, c2, algebraic_hash(f, hp, mask.r)};
        Witness wit = assign_validity_witness(f, *csp, layout, a, mask.r, pub);
        MockProof proof = groth16_prove(group, setup.pk, wit, rng);
        REQUIRE(groth16_verify(group, setup.vk, proof, pub.to_io()));
        std::vector<std::uint8_t> bytes = serialize_proof(group, proof);
        if (expected == 0) expected = bytes.size();
        CHECK(bytes.size() == expected);

        MockProof round_trip = parse_proof(group, bytes);
        CHECK(round_trip.a == proof.a);
        CHECK(round_trip.b == proof.b);
        CHECK(round_trip.c == proof.c);
    }
}

TEST_CASE("verify wall time is insensitive to constraint count at fixed io") {
    Rng rng(31);
    TinySystem small(20), large(200); // 10x the constraints, same io_len
    MockSetup setup_small = groth16_setup(small.group, small.qap, rng);
    MockSetup setup_large = groth16_setup(large.group, large.qap, rng);
    Witness ws = small.witness(3), wl = large.witness(3);
    MockProof ps = groth16_prove(small.group, setup_small.pk, ws, rng);
    MockProof pl = groth16_prove(large.group, setup_large.pk, wl, rng);

    auto time_verifies = [&](const TinySystem& sys, const MockSetup& setup, const MockProof& p,
                             const Witness& w) {
        using Clock = std::chrono::steady_clock;
        std::vector<double> times;
        for (int rep = 0; rep < 9; ++rep) {
            auto t0 = Clock::now();
            for (int i = 0; i < 3000; ++i) {
                volatile bool ok = groth16_verify(sys.group, setup.vk, p, w.io);
                (void)ok;
            }
            times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
        }
        std::sort(times.begin(), times.end());
        return times[times.size() / 2];
    };
    double ts = time_verifies(small, setup_small, ps, ws);
    double tl = time_verifies(large, setup_large, pl, wl);
    CHECK(std::fabs(tl - ts) / ts < 0.2);
}

TEST_CASE("zero-knowledge simulator produces accepting transcripts without a witness") {
    TinySystem sys(14);
    Rng rng(37);
    MockSetup setup = groth16_setup(sys.group, sys.qap, rng);
    Witness w = sys.witness(77);
    for (int i = 0; i < 50; ++i) {
        MockProof sim = groth16_simulate(sys.group, setup.vk, setup.toxic, w.io, rng);
        CHECK(groth16_verify(sys.group, setup.vk, sim, w.io));
    }
}

TEST_CASE("vk serialization round-trips") {
    TinySystem sys(5);
    Rng rng(41);
    MockSetup setup = groth16_setup(sys.group, sys.qap, rng);
    auto bytes = serialize_vk(sys.group, setup.vk);
    MockVerifyingKey vk = parse_vk(sys.group, bytes);
    CHECK(vk.io_len == setup.vk.io_len);
    CHECK(vk.io_quotients == setup.vk.io_quotients);
    Witness w = sys.witness(4);
    MockProof proof = groth16_prove(sys.group, setup.pk, w, rng);
    CHECK(groth16_verify(sys.group, vk, proof, w.io));
}

#include <doctest.h>

#include <cmath>

#include "bpfl/mask_negotiation.hpp"
#include "bpfl/model.hpp"
#include "bpfl/validity_circuit.hpp"

using namespace bpfl;

namespace {

struct Harness {
    Field f{bn254_scalar_params()};
    AlgebraicHashParams hp = make_hash_params(f);
    std::size_t d;
    FixedPointCodec codec;
    R1CS cs;
    ValidityCircuitLayout layout;

    explicit Harness(std::size_t dim) : d(dim), codec(make_codec(f, dim)) {
        auto built = build_validity_circuit(f, d, codec, hp);
        cs = std::move(built.first);
        layout = built.second;
    }

    bool satisfied(const std::vector<double>& w_i, const std::vector<double>& w_s,
                   double tau_c, double tau_e, std::uint64_t mask_seed = 99,
                   bool corrupt_hash = false) {
        std::vector<Fe> a = encode_vector(f, layout.codec, w_i);
        std::vector<Fe> b = encode_vector(f, layout.codec, w_s);
        MaskVector mask = expand_mask(f, hp, mask_seed, d);
        std::vector<Fe> masked(d);
        for (std::size_t j = 0; j < d; ++j) masked[j] = f.add(a[j], mask.r[j]);
        auto [c2, e2] = encode_thresholds(f, layout.codec, d, tau_c, tau_e);
        Fe h = algebraic_hash(f, hp, mask.r);
        if (corrupt_hash) h = f.add(h, f.one());
        ValidityPublicInputs pub{std::move(b), std::move(masked), e2, c2, h};
        Witness wit = assign_validity_witness(f, cs, layout, a, mask.r, pub);
        return check_satisfied(f, cs, wit);
    }
};

} // namespace

TEST_CASE("identical models satisfy for any tau_e >= 0 and tau_c <= 1") {
    Harness h(4);
    std::vector<double> w{0.5, -0.25, 1.0, 0.125};
    CHECK(h.satisfied(w, w, 1.0, 0.0));
    CHECK(h.satisfied(w, w, 0.0, 100.0));
    CHECK(h.satisfied(w, w, 0.99, 0.93));
}

TEST_CASE("antiparallel model is unsatisfiable regardless of tau_e") {
    Harness h(4);
    std::vector<double> w{0.5, -0.25, 1.0, 0.125};
    std::vector<double> flipped{-0.5, 0.25, -1.0, -0.125};
    CHECK_FALSE(h.satisfied(flipped, w, 0.0, 1e6));
    CHECK_FALSE(h.satisfied(flipped, w, 0.99, 0.93));
}

TEST_CASE("mask consistency: (1,2)+(3,4)=(4,6) passes, (3,8) fails") {
    Harness h(2);
    const Field& f = h.f;
    std::vector<Fe> a{f.from_u64(1), f.from_u64(2)};
    std::vector<Fe> b = a; // reference equal to the model: similarity holds
    std::vector<Fe> r{f.from_u64(3), f.from_u64(4)};
    auto [c2, e2] = encode_thresholds(f, h.layout.codec, 2, 0.9, 1.0);
    Fe hash_target = algebraic_hash(f, h.hp, r);

    ValidityPublicInputs ok{b, {f.from_u64(4), f.from_u64(6)}, e2, c2, hash_target};
    CHECK(check_satisfied(f, h.cs, assign_validity_witness(f, h.cs, h.layout, a, r, ok)));

    // the multiplicative tampering from the privacy discussion: w * r
    ValidityPublicInputs bad{b, {f.from_u64(3), f.from_u64(8)}, e2, c2, hash_target};
    CHECK_FALSE(check_satisfied(f, h.cs, assign_validity_witness(f, h.cs, h.layout, a, r, bad)));
}

TEST_CASE("cosine threshold: model at 60 degrees fails tau_c = 0.99") {
    Harness h(2);
    // rotate the reference by 60 degrees: cosine exactly 0.5
    std::vector<double> w_s{1.0, 0.0};
    double angle = M_PI / 3.0;
    std::vector<double> w_i{std::cos(angle), std::sin(angle)};
    CHECK(std::fabs(cosine_similarity(w_i, w_s) - 0.5) < 1e-12);
    CHECK_FALSE(h.satisfied(w_i, w_s, 0.99, 10.0));
    CHECK(h.satisfied(w_i, w_s, 0.45, 10.0));
    CHECK_FALSE(h.satisfied(w_i, w_s, 0.55, 10.0));
}

TEST_CASE("euclidean threshold boundary") {
    Harness h(2);
    std::vector<double> w_s{1.0, 1.0};
    std::vector<double> w_i{1.5, 1.0}; // distance 0.5, cosine ~0.98
    CHECK(h.satisfied(w_i, w_s, 0.9, 0.6));
    CHECK_FALSE(h.satisfied(w_i, w_s, 0.9, 0.4));
}

TEST_CASE("wrong hash target is rejected") {
    Harness h(3);
    std::vector<double> w{0.1, 0.2, 0.3};
    CHECK(h.satisfied(w, w, 0.9, 1.0, 7, false));
    CHECK_FALSE(h.satisfied(w, w, 0.9, 1.0, 7, true));
}

TEST_CASE("differential soundness against the plaintext predicate, d <= 16") {
    // random instances away from the fixed-point truncation band
    const double band = std::ldexp(1.0, -12);
    Rng rng(2024);
    int checked = 0;
    for (std::size_t d : {2u, 5u, 16u}) {
        Harness h(d);
        for (int trial = 0; trial < 60; ++trial) {
            std::vector<double> w_i(d), w_s(d);
            for (std::size_t j = 0; j < d; ++j) {
                w_i[j] = (rng.unit() - 0.5) * 4.0;
                w_s[j] = (rng.unit() - 0.5) * 4.0;
            }
            double tau_c = rng.unit() * 0.9;
            double tau_e = rng.unit() * 4.0;
            double cos = cosine_similarity(w_i, w_s);
            double dist = euclidean_distance(w_i, w_s);
            if (std::fabs(cos - tau_c) < band || std::fabs(dist - tau_e) < band) continue;
            bool plain = plain_validity_check(w_i, w_s, tau_c, tau_e);
            CHECK(h.satisfied(w_i, w_s, tau_c, tau_e) == plain);
            ++checked;
        }
    }
    CHECK(checked > 150);
}

TEST_CASE("threshold monotonicity: loosening never rejects a satisfiable instance") {
    Harness h(3);
    Rng rng(555);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> w_i(3), w_s(3);
        for (std::size_t j = 0; j < 3; ++j) {
            w_i[j] = (rng.unit() - 0.5) * 2.0;
            w_s[j] = w_i[j] + (rng.unit() - 0.5) * 0.2;
        }
        double tau_c = 0.8, tau_e = 1.0;
        if (!h.satisfied(w_i, w_s, tau_c, tau_e)) continue;
        CHECK(h.satisfied(w_i, w_s, tau_c - 0.3, tau_e));
        CHECK(h.satisfied(w_i, w_s, tau_c, tau_e * 8));
        CHECK(h.satisfied(w_i, w_s, 0.0, 1e9)); // saturated thresholds stay satisfiable
    }
}

TEST_CASE("constraint count grows linearly in d") {
    Field f(bn254_scalar_params());
    AlgebraicHashParams hp = make_hash_params(f);
    std::vector<double> xs, ys;
    for (std::size_t d = 2; d <= 16; d += 2) {
        auto [cs, layout] = build_validity_circuit(f, d, make_codec(f, d), hp);
        xs.push_back(static_cast<double>(d));
        ys.push_back(static_cast<double>(cs.rows.size()));
    }
    double n = static_cast<double>(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0, mean = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double fit = slope * xs[i] + intercept;
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - mean) * (ys[i] - mean);
    }
    CHECK(slope > 0);
    CHECK(1.0 - ss_res / ss_tot > 0.99);
}

TEST_CASE("public layout exposes exactly sigma_t, the masked model and h") {
    Harness h(3);
    CHECK(h.cs.io_len == 2 * 3 + 3);
    CHECK(h.layout.ref_model_start == 1);
    CHECK(h.layout.masked_model_start == 4);
    CHECK(h.layout.tau_e_sq_index == 7);
    CHECK(h.layout.tau_c_sq_index == 8);
    CHECK(h.layout.hash_index == 9);
    // the local model and mask sit strictly in the auxiliary region
    CHECK(h.layout.local_model_start > h.cs.io_len);
    CHECK(h.layout.mask_start > h.cs.io_len);
}

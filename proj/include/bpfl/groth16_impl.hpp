#pragma once

// Template definitions for groth16.hpp; include that header instead.

namespace bpfl {

template <BilinearGroupBackend G>
SetupOutput<G> groth16_setup(const G& group, std::shared_ptr<const QAP> qap, Rng& rng) {
    const Field& f = group.field();
    auto nonzero = [&] {
        for (;;) {
            Fe v = f.sample(rng);
            if (!f.is_zero(v)) return v;
        }
    };
    ToxicWaste toxic{nonzero(), nonzero(), nonzero(), nonzero(), nonzero()};

    const std::size_t n = qap->domain().size();
    const std::size_t num_vars = qap->num_vars();
    const std::size_t io = qap->io_len();

    typename QAP::ColumnEvals cols = qap->columns_at(toxic.s);
    Fe t_s = qap->target_at(toxic.s);
    Fe gamma_inv = f.inv(toxic.gamma);
    Fe delta_inv = f.inv(toxic.delta);

    SetupOutput<G> out;
    out.toxic = toxic;
    ProvingKey<G>& pk = out.pk;
    pk.qap = qap;

    pk.sigma1.alpha = group.embed_g1(toxic.alpha);
    pk.sigma1.beta = group.embed_g1(toxic.beta);
    pk.sigma1.delta = group.embed_g1(toxic.delta);
    pk.sigma2.beta = group.embed_g2(toxic.beta);
    pk.sigma2.gamma = group.embed_g2(toxic.gamma);
    pk.sigma2.delta = group.embed_g2(toxic.delta);

    pk.sigma1.s_pows.reserve(n);
    pk.sigma2.s_pows.reserve(n);
    Fe s_pow = f.one();
    for (std::size_t i = 0; i < n; ++i) {
        pk.sigma1.s_pows.push_back(group.embed_g1(s_pow));
        pk.sigma2.s_pows.push_back(group.embed_g2(s_pow));
        s_pow = f.mul(s_pow, toxic.s);
    }

    pk.sigma1.io_quotients.reserve(io + 1);
    pk.sigma1.aux_quotients.reserve(num_vars - io - 1);
    pk.u_at_s_g1.reserve(num_vars);
    pk.w_at_s_g1.reserve(num_vars);
    pk.w_at_s_g2.reserve(num_vars);
    for (std::size_t k = 0; k < num_vars; ++k) {
        Fe combined = f.add(f.add(f.mul(toxic.beta, cols.u[k]), f.mul(toxic.alpha, cols.w[k])),
                            cols.y[k]);
        if (k <= io) {
            pk.sigma1.io_quotients.push_back(group.embed_g1(f.mul(combined, gamma_inv)));
        } else {
            pk.sigma1.aux_quotients.push_back(group.embed_g1(f.mul(combined, delta_inv)));
        }
        pk.u_at_s_g1.push_back(group.embed_g1(cols.u[k]));
        pk.w_at_s_g1.push_back(group.embed_g1(cols.w[k]));
        pk.w_at_s_g2.push_back(group.embed_g2(cols.w[k]));
    }

    pk.sigma1.t_quotients.reserve(n > 1 ? n - 1 : 0);
    Fe ts_delta = f.mul(t_s, delta_inv);
    s_pow = f.one();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        pk.sigma1.t_quotients.push_back(group.embed_g1(f.mul(s_pow, ts_delta)));
        s_pow = f.mul(s_pow, toxic.s);
    }

    VerifyingKey<G>& vk = out.vk;
    vk.alpha = pk.sigma1.alpha;
    vk.beta = pk.sigma2.beta;
    vk.gamma = pk.sigma2.gamma;
    vk.delta = pk.sigma2.delta;
    vk.io_quotients = pk.sigma1.io_quotients;
    vk.io_len = io;
    return out;
}

namespace detail {

template <BilinearGroupBackend G>
Proof<G> groth16_prove_core(const G& group, const ProvingKey<G>& pk, const Witness& witness,
                            Rng& rng) {
    const Field& f = group.field();
    const QAP& qap = *pk.qap;
    std::vector<Fe> z = full_assignment(f, qap.r1cs(), witness);
    std::vector<Fe> h = qap.h_coefficients(z);

    Fe r1 = f.sample(rng);
    Fe r2 = f.sample(rng);

    typename G::G1 a = pk.sigma1.alpha;
    typename G::G2 b2 = pk.sigma2.beta;
    typename G::G1 b1 = pk.sigma1.beta;
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (f.is_zero(z[k])) continue;
        a = group.g1_add(a, group.g1_scale(pk.u_at_s_g1[k], z[k]));
        b2 = group.g2_add(b2, group.g2_scale(pk.w_at_s_g2[k], z[k]));
        b1 = group.g1_add(b1, group.g1_scale(pk.w_at_s_g1[k], z[k]));
    }
    a = group.g1_add(a, group.g1_scale(pk.sigma1.delta, r1));
    b2 = group.g2_add(b2, group.g2_scale(pk.sigma2.delta, r2));
    b1 = group.g1_add(b1, group.g1_scale(pk.sigma1.delta, r2));

    typename G::G1 c = group.embed_g1(f.zero());
    const std::size_t io = qap.io_len();
    for (std::size_t k = io + 1; k < z.size(); ++k) {
        if (f.is_zero(z[k])) continue;
        c = group.g1_add(c, group.g1_scale(pk.sigma1.aux_quotients[k - io - 1], z[k]));
    }
    for (std::size_t i = 0; i < pk.sigma1.t_quotients.size(); ++i) {
        if (i < h.size() && !f.is_zero(h[i]))
            c = group.g1_add(c, group.g1_scale(pk.sigma1.t_quotients[i], h[i]));
    }
    c = group.g1_add(c, group.g1_scale(a, r2));
    c = group.g1_add(c, group.g1_scale(b1, r1));
    c = group.g1_add(c, group.g1_scale(pk.sigma1.delta, f.neg(f.mul(r1, r2))));

    return Proof<G>{a, c, b2};
}

} // namespace detail

template <BilinearGroupBackend G>
Proof<G> groth16_prove(const G& group, const ProvingKey<G>& pk, const Witness& witness, Rng& rng) {
    if (!check_satisfied(group.field(), pk.qap->r1cs(), witness))
        throw ProverError("groth16: witness does not satisfy the constraint system");
    return detail::groth16_prove_core(group, pk, witness, rng);
}

template <BilinearGroupBackend G>
Proof<G> groth16_prove_unchecked(const G& group, const ProvingKey<G>& pk, const Witness& witness,
                                 Rng& rng) {
    return detail::groth16_prove_core(group, pk, witness, rng);
}

template <BilinearGroupBackend G>
bool groth16_verify(const G& group, const VerifyingKey<G>& vk, const Proof<G>& proof,
                    std::span<const Fe> public_inputs) {
    if (public_inputs.size() != vk.io_len) return false;
    if (vk.io_quotients.size() != vk.io_len + 1) return false;
    typename G::G1 acc = vk.io_quotients[0];
    for (std::size_t i = 0; i < public_inputs.size(); ++i) {
        acc = group.g1_add(acc, group.g1_scale(vk.io_quotients[i + 1], public_inputs[i]));
    }
    typename G::GT lhs = group.pairing(proof.a, proof.b);
    typename G::GT rhs = group.pairing(vk.alpha, vk.beta);
    rhs = group.gt_combine(rhs, group.pairing(acc, vk.gamma));
    rhs = group.gt_combine(rhs, group.pairing(proof.c, vk.delta));
    return group.gt_eq(lhs, rhs);
}

} // namespace bpfl

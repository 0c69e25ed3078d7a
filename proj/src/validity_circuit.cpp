#include "bpfl/validity_circuit.hpp"

#include <stdexcept>

#include "bpfl/errors.hpp"

namespace bpfl {

namespace {

struct AssignInputs {
    std::span<const Fe> local_model;
    std::span<const Fe> mask;
    const ValidityPublicInputs* pub;
};

/// y^e via square-and-multiply over constraint variables; e >= 2.
Var pow_gadget(CircuitBuilder& cb, const LinComb& y, unsigned e) {
    const Field& f = cb.field();
    unsigned top = 31 - __builtin_clz(e);
    LinComb acc = y;
    Var acc_var{0};
    for (int bit = static_cast<int>(top) - 1; bit >= 0; --bit) {
        acc_var = cb.mul(acc, acc);
        acc = LinComb(acc_var, f.one());
        if ((e >> bit) & 1) {
            acc_var = cb.mul(acc, y);
            acc = LinComb(acc_var, f.one());
        }
    }
    return acc_var;
}

Var permutation_gadget(CircuitBuilder& cb, LinComb state, const AlgebraicHashParams& hash) {
    const Field& f = cb.field();
    Var out{0};
    for (unsigned t = 0; t < hash.rounds; ++t) {
        LinComb y = state;
        y.add_constant(hash.round_constants[t]);
        out = pow_gadget(cb, y, hash.exponent);
        state = LinComb(out, f.one());
    }
    return out;
}

void synthesize(CircuitBuilder& cb, std::size_t dim, const FixedPointCodec& codec,
                const AlgebraicHashParams& hash, const AssignInputs* in,
                ValidityCircuitLayout* layout_out) {
    const Field& f = cb.field();
    const Fe one = f.one();
    const LinComb one_lc{Var{0}, one};
    const unsigned sum_bits = codec.sum_bits;

    if (layout_out) {
        layout_out->dim = dim;
        layout_out->codec = codec;
        layout_out->hash = hash;
    }

    // --- public inputs ---
    std::vector<Var> ref(dim), masked(dim);
    for (std::size_t j = 0; j < dim; ++j)
        ref[j] = cb.public_input(in ? std::optional<Fe>(in->pub->ref_model[j]) : std::nullopt);
    for (std::size_t j = 0; j < dim; ++j)
        masked[j] =
            cb.public_input(in ? std::optional<Fe>(in->pub->masked_model[j]) : std::nullopt);
    Var tau_e_sq = cb.public_input(in ? std::optional<Fe>(in->pub->tau_e_sq) : std::nullopt);
    Var tau_c_sq = cb.public_input(in ? std::optional<Fe>(in->pub->tau_c_sq) : std::nullopt);
    Var hash_target = cb.public_input(in ? std::optional<Fe>(in->pub->hash_target) : std::nullopt);
    if (layout_out) {
        layout_out->ref_model_start = ref[0].index;
        layout_out->masked_model_start = masked[0].index;
        layout_out->tau_e_sq_index = tau_e_sq.index;
        layout_out->tau_c_sq_index = tau_c_sq.index;
        layout_out->hash_index = hash_target.index;
    }

    // --- auxiliary witness: local model and mask ---
    std::vector<Var> local(dim), mask(dim);
    for (std::size_t j = 0; j < dim; ++j)
        local[j] = cb.aux(in ? std::optional<Fe>(in->local_model[j]) : std::nullopt);
    for (std::size_t j = 0; j < dim; ++j)
        mask[j] = cb.aux(in ? std::optional<Fe>(in->mask[j]) : std::nullopt);
    if (layout_out) {
        layout_out->local_model_start = local[0].index;
        layout_out->mask_start = mask[0].index;
    }

    // (iv) mask consistency: (w_i^j + r^j) * 1 = masked^j
    for (std::size_t j = 0; j < dim; ++j) {
        LinComb lhs(local[j], one);
        lhs.add(mask[j], one);
        cb.enforce(lhs, one_lc, LinComb(masked[j], one));
    }

    // per-coordinate encoding check: w_i^j + kW in [0, 2^Bw)
    const std::int64_t max_mag = codec.max_magnitude();
    unsigned encode_bits = 1;
    while ((std::int64_t{1} << encode_bits) < 2 * max_mag + 1) ++encode_bits;
    if (layout_out) layout_out->encode_bits = encode_bits;
    Fe shift = f.from_i64(max_mag);
    for (std::size_t j = 0; j < dim; ++j) {
        LinComb shifted(local[j], one);
        shifted.add_constant(shift);
        range_check_gadget(cb, shifted, encode_bits);
    }

    // products feeding the similarity sums
    std::vector<Var> sq_diff(dim), dot_terms(dim), sq_local(dim), sq_ref(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        LinComb diff(local[j], one);
        diff.add(ref[j], f.neg(one));
        sq_diff[j] = cb.mul(diff, diff);
        dot_terms[j] = cb.mul(LinComb(local[j], one), LinComb(ref[j], one));
        sq_local[j] = cb.mul(LinComb(local[j], one), LinComb(local[j], one));
        sq_ref[j] = cb.mul(LinComb(ref[j], one), LinComb(ref[j], one));
    }

    // (v) sponge over the mask, pinned to the public hash target
    LinComb state;
    for (std::size_t j = 0; j < dim; ++j) {
        LinComb absorbed = state;
        absorbed.add(mask[j], one);
        Var out = permutation_gadget(cb, absorbed, hash);
        state = LinComb(out, one);
    }
    cb.enforce(state, one_lc, LinComb(hash_target, one));

    // (i) Euclidean slack: tau_e_sq - sum sq_diff in [0, 2^B)
    LinComb euclid_slack_lhs(tau_e_sq, one);
    for (std::size_t j = 0; j < dim; ++j) euclid_slack_lhs.add(sq_diff[j], f.neg(one));
    std::optional<Fe> euclid_slack_val;
    if (cb.assigning()) euclid_slack_val = cb.eval(euclid_slack_lhs);
    Var euclid_slack = cb.aux(euclid_slack_val);
    cb.enforce(euclid_slack_lhs, one_lc, LinComb(euclid_slack, one));
    range_check_gadget(cb, LinComb(euclid_slack, one), sum_bits);

    // (iii) dot product sign: sum of dot terms in [0, 2^B)
    LinComb dot;
    for (std::size_t j = 0; j < dim; ++j) dot.add(dot_terms[j], one);
    range_check_gadget(cb, dot, sum_bits);

    // (ii) cosine: (k * dot)^2 - tau_c_sq * Sa * Sb in [0, 2^B)
    Fe k_fe = f.from_u64(codec.scale);
    LinComb k_dot;
    for (std::size_t j = 0; j < dim; ++j) k_dot.add(dot_terms[j], k_fe);
    Var cosine_lhs = cb.mul(k_dot, k_dot);
    LinComb sum_sq_local, sum_sq_ref;
    for (std::size_t j = 0; j < dim; ++j) {
        sum_sq_local.add(sq_local[j], one);
        sum_sq_ref.add(sq_ref[j], one);
    }
    Var norms = cb.mul(sum_sq_local, sum_sq_ref);
    Var cosine_rhs = cb.mul(LinComb(tau_c_sq, one), LinComb(norms, one));
    LinComb cosine_slack_lhs(cosine_lhs, one);
    cosine_slack_lhs.add(cosine_rhs, f.neg(one));
    std::optional<Fe> cosine_slack_val;
    if (cb.assigning()) cosine_slack_val = cb.eval(cosine_slack_lhs);
    Var cosine_slack = cb.aux(cosine_slack_val);
    cb.enforce(cosine_slack_lhs, one_lc, LinComb(cosine_slack, one));
    range_check_gadget(cb, LinComb(cosine_slack, one), sum_bits);
}

} // namespace

std::vector<Fe> ValidityPublicInputs::to_io() const {
    std::vector<Fe> io;
    io.reserve(ref_model.size() + masked_model.size() + 3);
    io.insert(io.end(), ref_model.begin(), ref_model.end());
    io.insert(io.end(), masked_model.begin(), masked_model.end());
    io.push_back(tau_e_sq);
    io.push_back(tau_c_sq);
    io.push_back(hash_target);
    return io;
}

std::pair<R1CS, ValidityCircuitLayout> build_validity_circuit(const Field& field, std::size_t dim,
                                                              const FixedPointCodec& codec,
                                                              const AlgebraicHashParams& hash) {
    if (dim == 0) throw ConfigError("validity circuit: dimension must be >= 1");
    if (codec.scale < 8) throw ConfigError("validity circuit: scale must be >= 8");
    FixedPointCodec sized = codec;
    sized.sum_bits = sum_bits_for(field, codec, dim); // throws on overflow
    ValidityCircuitLayout layout;
    CircuitBuilder cb = CircuitBuilder::build_mode(field);
    synthesize(cb, dim, sized, hash, nullptr, &layout);
    return {cb.take_r1cs(), layout};
}

Witness assign_validity_witness(const Field& field, const R1CS& shape,
                                const ValidityCircuitLayout& layout,
                                std::span<const Fe> local_model, std::span<const Fe> mask,
                                const ValidityPublicInputs& pub) {
    if (local_model.size() != layout.dim || mask.size() != layout.dim ||
        pub.ref_model.size() != layout.dim || pub.masked_model.size() != layout.dim)
        throw std::invalid_argument("assign_validity_witness: vector length != circuit dim");
    CircuitBuilder cb = CircuitBuilder::assign_mode(field, shape);
    AssignInputs in{local_model, mask, &pub};
    synthesize(cb, layout.dim, layout.codec, layout.hash, &in, nullptr);
    return cb.take_witness();
}

std::pair<Fe, Fe> encode_thresholds(const Field& field, const FixedPointCodec& codec,
                                    std::size_t dim, double tau_c, double tau_e) {
    mpz_class kw(static_cast<long>(codec.max_magnitude()));
    mpz_class d(static_cast<unsigned long>(dim));
    mpz_class k(static_cast<unsigned long>(codec.scale));

    mpz_class c2 = threshold_squared(codec, tau_c);
    mpz_class c2_max = k * k;
    if (c2 > c2_max) c2 = c2_max;

    mpz_class e2 = threshold_squared(codec, tau_e);
    mpz_class e2_max = d * (2 * kw) * (2 * kw);
    if (e2 > e2_max) e2 = e2_max;

    return {field.from_mpz(c2), field.from_mpz(e2)};
}

} // namespace bpfl

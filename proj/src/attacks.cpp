#include "bpfl/attacks.hpp"

#include <algorithm>
#include <cmath>

#include "bpfl/errors.hpp"

namespace bpfl {

ModelVector add_noise(const ModelVector& w, double sigma, std::uint64_t seed) {
    if (sigma < 0) throw std::invalid_argument("add_noise: sigma must be >= 0");
    ModelVector out = w;
    if (sigma == 0) return out;
    Rng rng(seed);
    for (double& v : out) v += rng.normal(0.0, sigma);
    return out;
}

ModelVector sign_flip(const ModelVector& w) {
    ModelVector out = w;
    for (double& v : out) v = -v;
    return out;
}

namespace {

ModelVector mean_of(std::span<const ModelVector> models) {
    ModelVector mu(models.front().size(), 0.0);
    for (const ModelVector& m : models)
        for (std::size_t j = 0; j < mu.size(); ++j) mu[j] += m[j];
    for (double& v : mu) v /= static_cast<double>(models.size());
    return mu;
}

ModelVector perturbation_vector(std::span<const ModelVector> benign, Perturbation dir) {
    ModelVector mu = mean_of(benign);
    ModelVector p(mu.size(), 0.0);
    switch (dir) {
        case Perturbation::NegUnitMean: {
            double norm = 0;
            for (double v : mu) norm += v * v;
            norm = std::sqrt(norm);
            if (norm == 0) return p;
            for (std::size_t j = 0; j < p.size(); ++j) p[j] = -mu[j] / norm;
            return p;
        }
        case Perturbation::NegSign: {
            for (std::size_t j = 0; j < p.size(); ++j)
                p[j] = mu[j] > 0 ? -1.0 : (mu[j] < 0 ? 1.0 : 0.0);
            return p;
        }
        case Perturbation::NegStd: {
            for (const ModelVector& m : benign)
                for (std::size_t j = 0; j < p.size(); ++j) {
                    double d = m[j] - mu[j];
                    p[j] += d * d;
                }
            for (std::size_t j = 0; j < p.size(); ++j)
                p[j] = -std::sqrt(p[j] / static_cast<double>(benign.size()));
            return p;
        }
    }
    return p;
}

double sq_dist(const ModelVector& a, const ModelVector& b) {
    double acc = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double d = a[j] - b[j];
        acc += d * d;
    }
    return acc;
}

struct AttackGeometry {
    ModelVector mu, p;
    double bound = 0; ///< squared bound of the feasibility predicate
    bool min_sum = false;
    std::span<const ModelVector> benign;

    bool feasible(double gamma) const {
        ModelVector m(mu.size());
        for (std::size_t j = 0; j < m.size(); ++j) m[j] = mu[j] + gamma * p[j];
        if (min_sum) {
            double total = 0;
            for (const ModelVector& b : benign) total += sq_dist(m, b);
            return total <= bound + 1e-12;
        }
        double worst = 0;
        for (const ModelVector& b : benign) worst = std::max(worst, sq_dist(m, b));
        return worst <= bound + 1e-12;
    }
};

AttackGeometry make_geometry(std::span<const ModelVector> benign, Perturbation dir,
                             bool min_sum) {
    AttackGeometry g;
    g.mu = mean_of(benign);
    g.p = perturbation_vector(benign, dir);
    g.min_sum = min_sum;
    g.benign = benign;
    if (min_sum) {
        for (const ModelVector& a : benign) {
            double total = 0;
            for (const ModelVector& b : benign) total += sq_dist(a, b);
            g.bound = std::max(g.bound, total);
        }
    } else {
        for (std::size_t i = 0; i < benign.size(); ++i)
            for (std::size_t j = i + 1; j < benign.size(); ++j)
                g.bound = std::max(g.bound, sq_dist(benign[i], benign[j]));
    }
    return g;
}

} // namespace

double attack_gamma(std::span<const ModelVector> benign, Perturbation dir,
                    std::span<const double> gamma_grid, bool min_sum) {
    if (benign.size() < 2) throw ConfigError("attack: needs at least 2 benign models");
    if (gamma_grid.empty()) throw ConfigError("attack: empty gamma grid");
    AttackGeometry g = make_geometry(benign, dir, min_sum);

    // bracket from the grid, extending upward while everything is feasible
    double lo = 0.0, hi = 0.0;
    for (double gamma : gamma_grid) {
        if (gamma < 0) throw ConfigError("attack: gamma grid must be nonnegative");
        if (g.feasible(gamma))
            lo = std::max(lo, gamma);
        else
            hi = hi == 0.0 ? gamma : std::min(hi, gamma);
    }
    if (hi == 0.0) {
        hi = std::max(1.0, 2 * lo);
        int guard = 0;
        while (g.feasible(hi) && guard++ < 64) {
            lo = hi;
            hi *= 2;
        }
    }
    if (hi <= lo) hi = lo + 1.0;
    while (hi - lo > 1e-3) {
        double mid = 0.5 * (lo + hi);
        if (g.feasible(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

namespace {
ModelVector crafted_update(std::span<const ModelVector> benign, Perturbation dir,
                           std::span<const double> gamma_grid, bool min_sum) {
    double gamma = attack_gamma(benign, dir, gamma_grid, min_sum);
    AttackGeometry g = make_geometry(benign, dir, min_sum);
    ModelVector out(g.mu.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = g.mu[j] + gamma * g.p[j];
    return out;
}
} // namespace

ModelVector min_max_attack(std::span<const ModelVector> benign, Perturbation dir,
                           std::span<const double> gamma_grid) {
    return crafted_update(benign, dir, gamma_grid, false);
}

ModelVector min_sum_attack(std::span<const ModelVector> benign, Perturbation dir,
                           std::span<const double> gamma_grid) {
    return crafted_update(benign, dir, gamma_grid, true);
}

namespace {

Envelope make_submission(const HonestRoundView& v, std::span<const Fe> local_enc,
                         std::span<const Fe> mask, std::vector<Fe> submitted_masked,
                         const ValidityPublicInputs& proof_pub, Rng& rng) {
    const Field& f = *v.field;
    Witness wit = assign_validity_witness(f, *v.r1cs, *v.layout, local_enc, mask, proof_pub);
    MockProof proof = check_satisfied(f, *v.r1cs, wit)
                          ? groth16_prove(*v.group, *v.proving_key, wit, rng)
                          : groth16_prove_unchecked(*v.group, *v.proving_key, wit, rng);
    SubmissionMsg msg;
    msg.masked_model = std::move(submitted_masked);
    msg.proof_bytes = serialize_proof(*v.group, proof);
    return Envelope{v.round, v.client_id, std::move(msg)};
}

} // namespace

Envelope malicious_client_behavior(AttackVariant behavior, const HonestRoundView& v, Rng& rng) {
    const Field& f = *v.field;
    const FixedPointCodec& codec = v.layout->codec;
    std::vector<Fe> ref_enc = encode_vector(f, codec, v.ref_model);
    const std::vector<Fe>& r = v.mask->r;
    const std::size_t d = v.layout->dim;

    switch (behavior) {
        case AttackVariant::InvalidModel: {
            // mask an invalid model correctly; the circuit check (i)/(ii) fails
            ModelVector bad = sign_flip(v.local_model);
            std::vector<Fe> bad_enc = encode_vector(f, codec, bad);
            std::vector<Fe> masked(d);
            for (std::size_t j = 0; j < d; ++j) masked[j] = f.add(bad_enc[j], r[j]);
            ValidityPublicInputs pub{ref_enc, masked, v.tau_e_sq, v.tau_c_sq, v.mode_hash};
            return make_submission(v, bad_enc, r, masked, pub, rng);
        }
        case AttackVariant::BadMaskOp: {
            // prove over the correct w+r, submit w*r instead
            std::vector<Fe> local_enc = encode_vector(f, codec, v.local_model);
            std::vector<Fe> honest_masked(d), wrong_masked(d);
            for (std::size_t j = 0; j < d; ++j) {
                honest_masked[j] = f.add(local_enc[j], r[j]);
                wrong_masked[j] = f.mul(local_enc[j], r[j]);
            }
            ValidityPublicInputs pub{ref_enc, honest_masked, v.tau_e_sq, v.tau_c_sq, v.mode_hash};
            return make_submission(v, local_enc, r, std::move(wrong_masked), pub, rng);
        }
        case AttackVariant::WrongMaskVector: {
            // consistent masking with r' != r; the hash commitment gives it away
            std::vector<Fe> local_enc = encode_vector(f, codec, v.local_model);
            MaskVector wrong = expand_mask(f, v.layout->hash, v.mask->seed + 1, d);
            std::vector<Fe> masked(d);
            for (std::size_t j = 0; j < d; ++j) masked[j] = f.add(local_enc[j], wrong.r[j]);
            // best effort: self-consistent hash target so the proof itself is
            // sound, but the server checks against its own h
            Fe own_hash = algebraic_hash(f, v.layout->hash, wrong.r);
            ValidityPublicInputs pub{ref_enc, masked, v.tau_e_sq, v.tau_c_sq, own_hash};
            return make_submission(v, local_enc, wrong.r, masked, pub, rng);
        }
        case AttackVariant::ForgedProof: {
            // witness {w_S, r~} with r~ = masked~ - enc(w_S): passes (i)-(iv),
            // caught only by the hash constraint
            ModelVector bad = sign_flip(v.local_model);
            std::vector<Fe> bad_enc = encode_vector(f, codec, bad);
            std::vector<Fe> masked(d), forged_mask(d);
            for (std::size_t j = 0; j < d; ++j) {
                masked[j] = f.add(bad_enc[j], r[j]);
                forged_mask[j] = f.sub(masked[j], ref_enc[j]);
            }
            ValidityPublicInputs pub{ref_enc, masked, v.tau_e_sq, v.tau_c_sq, v.mode_hash};
            return make_submission(v, ref_enc, forged_mask, masked, pub, rng);
        }
        default:
            throw std::invalid_argument("malicious_client_behavior: not a protocol behavior");
    }
}

} // namespace bpfl

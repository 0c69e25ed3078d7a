#pragma once

#include <cstdint>
#include <span>

#include "bpfl/groth16.hpp"
#include "bpfl/mask_negotiation.hpp"
#include "bpfl/messages.hpp"
#include "bpfl/model.hpp"
#include "bpfl/validity_circuit.hpp"

namespace bpfl {

enum class AttackVariant {
    None,
    AddNoise,
    SignFlip,
    MinMax,
    MinSum,
    ForgedProof,
    BadMaskOp,
    WrongMaskVector,
    InvalidModel,
};

enum class Perturbation { NegUnitMean, NegSign, NegStd };

struct AttackSpec {
    AttackVariant variant = AttackVariant::None;
    double fraction = 0.0; ///< fraction of malicious clients, must stay < 0.5
    double noise_sigma = 1.0;
    /// Amplification applied to the flipped model (a malicious client may
    /// submit any vector; 1.0 reproduces the plain sign flip).
    double flip_scale = 1.0;
    Perturbation perturbation = Perturbation::NegUnitMean;
    std::vector<double> gamma_grid = {0.5, 1.0, 2.0, 5.0, 10.0};
    bool wrong_setup_hash = false; ///< submit a bogus h_i during setup

    std::size_t malicious_count(std::size_t n) const {
        return static_cast<std::size_t>(fraction * static_cast<double>(n) + 1e-9);
    }
    bool is_malicious(std::uint32_t client_id, std::size_t n) const {
        if (variant == AttackVariant::None) return false;
        return client_id > n - malicious_count(n); // highest ids are malicious
    }
    bool is_protocol_behavior() const {
        return variant == AttackVariant::ForgedProof || variant == AttackVariant::BadMaskOp ||
               variant == AttackVariant::WrongMaskVector || variant == AttackVariant::InvalidModel;
    }
};

ModelVector add_noise(const ModelVector& w, double sigma, std::uint64_t seed);
ModelVector sign_flip(const ModelVector& w);

/// Crafted update mu + gamma * p with the largest feasible gamma
/// (Min-Max: distance to every benign model bounded by the max pairwise
/// benign distance; Min-Sum: sum of squared distances bounded by the worst
/// benign sum). Bracket from the grid, then halving search to 1e-3.
ModelVector min_max_attack(std::span<const ModelVector> benign, Perturbation dir,
                           std::span<const double> gamma_grid);
ModelVector min_sum_attack(std::span<const ModelVector> benign, Perturbation dir,
                           std::span<const double> gamma_grid);

/// Largest feasible gamma for either attack (exposed for oracle tests).
double attack_gamma(std::span<const ModelVector> benign, Perturbation dir,
                    std::span<const double> gamma_grid, bool min_sum);

/// Everything an honest client would hold when producing its round-2
/// submission; the malicious behaviors rewrite parts of it.
struct HonestRoundView {
    const Field* field = nullptr;
    const MockBilinearGroup* group = nullptr;
    const R1CS* r1cs = nullptr;
    const ValidityCircuitLayout* layout = nullptr;
    const MockProvingKey* proving_key = nullptr;
    ModelVector local_model;   ///< honest trained w_i (clipped)
    const MaskVector* mask = nullptr;
    ModelVector ref_model;     ///< w_S from sigma_t
    Fe tau_c_sq, tau_e_sq;     ///< threshold encodings
    Fe mode_hash;              ///< h the server pinned at setup
    std::uint32_t round = 0;
    std::uint32_t client_id = 0;
};

/// The four malicious behaviors:
///  InvalidModel     - masks an invalid model correctly and proves over it
///  BadMaskOp        - proves over w+r but submits w*r (elementwise)
///  WrongMaskVector  - masks and proves with r' != r
///  ForgedProof      - witness {w_S, r~} with r~ = masked - enc(w_S)
/// Each returns the exact submission the malicious client sends.
Envelope malicious_client_behavior(AttackVariant behavior, const HonestRoundView& view, Rng& rng);

} // namespace bpfl

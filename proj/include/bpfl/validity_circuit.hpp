#pragma once

#include <span>
#include <utility>

#include "bpfl/fixed_point.hpp"
#include "bpfl/hash.hpp"
#include "bpfl/r1cs.hpp"

namespace bpfl {

/// Variable map of the validity circuit. Public side carries the per-round
/// proof parameters plus the submitted masked model; the local model and the
/// mask vector live strictly in the auxiliary witness.
struct ValidityCircuitLayout {
    std::size_t dim = 0;
    FixedPointCodec codec;
    AlgebraicHashParams hash;
    VarIndex ref_model_start = 0;    ///< w_S, dim public slots
    VarIndex masked_model_start = 0; ///< submitted masked model, dim public slots
    VarIndex tau_e_sq_index = 0;     ///< floor((k*tau_e)^2), public
    VarIndex tau_c_sq_index = 0;     ///< floor((k*tau_c)^2), public
    VarIndex hash_index = 0;         ///< expected mask hash, public
    VarIndex local_model_start = 0;  ///< w_i, dim aux slots
    VarIndex mask_start = 0;         ///< r, dim aux slots
    unsigned encode_bits = 0;        ///< width of the per-coordinate encoding check
};

struct ValidityPublicInputs {
    std::vector<Fe> ref_model;
    std::vector<Fe> masked_model;
    Fe tau_e_sq, tau_c_sq, hash_target;

    std::vector<Fe> to_io() const;
};

/// Builds the circuit enforcing, over fixed-point encodings:
///   (i)   sum_j (k w_i^j - k w_S^j)^2 <= (k tau_e)^2
///   (ii)  (k sum_j k w_i^j * k w_S^j)^2 >= (k tau_c)^2 * sum(k w_i^j)^2 * sum(k w_S^j)^2
///   (iii) the dot product sum_j k w_i^j * k w_S^j is non-negative
///   (iv)  masked^j = w_i^j + r^j for all j
///   (v)   AlgebraicHash(r) = h
/// plus per-coordinate encoding range checks on w_i that make the sums in
/// (i)-(iii) well defined. Throws ConfigError when the bit-width bound for
/// this (dim, codec, field) combination cannot be met.
std::pair<R1CS, ValidityCircuitLayout> build_validity_circuit(const Field& field, std::size_t dim,
                                                              const FixedPointCodec& codec,
                                                              const AlgebraicHashParams& hash);

/// Full assignment including intermediates and bit decompositions. The result
/// satisfies the R1CS iff conditions (i)-(v) actually hold for the inputs;
/// inconsistent inputs are assigned as-is and simply fail satisfaction.
Witness assign_validity_witness(const Field& field, const R1CS& shape,
                                const ValidityCircuitLayout& layout,
                                std::span<const Fe> local_model, std::span<const Fe> mask,
                                const ValidityPublicInputs& pub);

/// Threshold encodings as published in the per-round parameters; the
/// Euclidean side saturates at the largest distance representable for this
/// dimension so that loosening a threshold never rejects an honest model.
std::pair<Fe, Fe> encode_thresholds(const Field& field, const FixedPointCodec& codec,
                                    std::size_t dim, double tau_c, double tau_e);

} // namespace bpfl

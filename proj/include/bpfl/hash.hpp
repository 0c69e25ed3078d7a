#pragma once

#include <span>
#include <string>
#include <vector>

#include "bpfl/field.hpp"

namespace bpfl {

/// Parameters of the arithmetization-friendly sponge used for mask
/// commitments and seed expansion. Round constants are rejection-sampled
/// from a deterministic stream keyed only by the ASCII seed, so any
/// implementation can reproduce them.
///
/// WARNING: the default round count is sized for desk-scale experiments,
/// NOT for cryptographic security margins.
struct AlgebraicHashParams {
    unsigned rounds = 11;
    unsigned exponent = 5; ///< gcd(exponent, p-1) = 1, from FieldParams
    std::string constants_seed = "bpfl/permutation/v1";
    std::vector<Fe> round_constants; ///< length == rounds
};

AlgebraicHashParams make_hash_params(const Field& field, unsigned rounds = 11,
                                     const std::string& constants_seed = "bpfl/permutation/v1");

/// One permutation call: R rounds of y <- (y + c_t)^e.
Fe hash_permutation(const Field& field, const AlgebraicHashParams& params, Fe y);

/// Sponge: state <- 0; for each element x: state <- Perm(state + x).
/// The empty input hashes to 0.
Fe algebraic_hash(const Field& field, const AlgebraicHashParams& params,
                  std::span<const Fe> elements);

} // namespace bpfl

#pragma once

#include <cstdint>
#include <span>

#include "bpfl/fixed_point.hpp"
#include "bpfl/model.hpp"

namespace bpfl {

enum class AggregationVariant { FedAvg, Krum, Median, Bulyan, FlTrust, BpflMaskedSum };

struct AggregationRule {
    AggregationVariant variant = AggregationVariant::FedAvg;
    unsigned f = 0; ///< assumed malicious count, Krum/Bulyan
};

struct AggregationContext {
    const ModelVector* reference = nullptr;      ///< w_S, FLTrust only
    const ModelVector* current_global = nullptr; ///< fallback when all weights vanish
};

/// Plaintext aggregation for the baseline rules (everything except
/// bpfl-masked-sum). Throws ConfigError when a rule's model-count
/// requirement is not met.
ModelVector aggregate_plain(const AggregationRule& rule, std::span<const ModelVector> models,
                            const AggregationContext& ctx);

/// Index selected by Krum (useful for tests).
std::size_t krum_select(std::span<const ModelVector> models, unsigned f);

/// Field sum of encoded masked models plus the accepted count; the division
/// by the count happens client-side after unmasking, where fixed-point
/// semantics are exact.
struct EncodedSum {
    std::vector<Fe> sum;
    std::uint32_t count = 0;
};

EncodedSum aggregate_masked(const Field& field, std::span<const std::vector<Fe>> masked_models);

/// Recovers the plain mean: decode((sum - count * r)) / count per coordinate.
/// Throws ProtocolError when a coordinate's lift falls outside the bound
/// count * k * W_max (tampering or overflow).
ModelVector unmask_global(const Field& field, const FixedPointCodec& codec, const EncodedSum& agg,
                          std::span<const Fe> mask);

} // namespace bpfl

#include "bpfl/aggregate.hpp"

#include <algorithm>
#include <cmath>

#include "bpfl/errors.hpp"

namespace bpfl {

namespace {

ModelVector coordinate_mean(std::span<const ModelVector> models) {
    ModelVector out(models.front().size(), 0.0);
    for (const ModelVector& m : models) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += m[j];
    }
    for (double& v : out) v /= static_cast<double>(models.size());
    return out;
}

ModelVector coordinate_median(std::span<const ModelVector> models) {
    ModelVector out(models.front().size(), 0.0);
    std::vector<double> column(models.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        for (std::size_t i = 0; i < models.size(); ++i) column[i] = models[i][j];
        std::sort(column.begin(), column.end());
        std::size_t n = column.size();
        out[j] = (n % 2 == 1) ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
    }
    return out;
}

double sq_distance(const ModelVector& a, const ModelVector& b) {
    double acc = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double d = a[j] - b[j];
        acc += d * d;
    }
    return acc;
}

/// Krum score: sum of squared distances to the `closest` nearest peers.
std::size_t krum_select_impl(std::span<const ModelVector> models, std::size_t closest) {
    std::size_t n = models.size();
    std::size_t best = 0;
    double best_score = 0;
    std::vector<double> dists;
    for (std::size_t i = 0; i < n; ++i) {
        dists.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) dists.push_back(sq_distance(models[i], models[j]));
        }
        std::sort(dists.begin(), dists.end());
        double score = 0;
        for (std::size_t k = 0; k < closest && k < dists.size(); ++k) score += dists[k];
        if (i == 0 || score < best_score) {
            best = i;
            best_score = score;
        }
    }
    return best;
}

ModelVector fltrust(std::span<const ModelVector> models, const AggregationContext& ctx) {
    if (ctx.reference == nullptr)
        throw ConfigError("fltrust: requires the server reference model");
    const ModelVector& ref = *ctx.reference;
    double ref_norm = std::sqrt(sq_distance(ref, ModelVector(ref.size(), 0.0)));
    ModelVector out(ref.size(), 0.0);
    double total_trust = 0;
    for (const ModelVector& m : models) {
        double cos;
        try {
            cos = cosine_similarity(m, ref);
        } catch (const std::domain_error&) {
            continue; // zero vector earns zero trust
        }
        double trust = std::max(0.0, cos);
        if (trust == 0) continue;
        double norm = std::sqrt(sq_distance(m, ModelVector(m.size(), 0.0)));
        double rescale = norm > 0 ? ref_norm / norm : 0.0;
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += trust * rescale * m[j];
        total_trust += trust;
    }
    if (total_trust == 0) {
        if (ctx.current_global != nullptr) return *ctx.current_global;
        return ModelVector(ref.size(), 0.0);
    }
    for (double& v : out) v /= total_trust;
    return out;
}

ModelVector bulyan(std::span<const ModelVector> models, unsigned f) {
    std::size_t n = models.size();
    if (n < 4 * static_cast<std::size_t>(f) + 1)
        throw ConfigError("bulyan: needs n >= 4f + 1 models");
    std::size_t theta = n - 2 * f;
    std::vector<ModelVector> pool(models.begin(), models.end());
    std::vector<ModelVector> selected;
    while (selected.size() < theta) {
        std::size_t closest = pool.size() > f + 2 ? pool.size() - f - 2 : 1;
        std::size_t pick = krum_select_impl(pool, closest);
        selected.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    // trimmed mean around the median, beta = theta - 2f values per coordinate
    std::size_t beta = theta > 2 * f ? theta - 2 * f : 1;
    ModelVector out(selected.front().size(), 0.0);
    std::vector<std::pair<double, double>> ranked(selected.size()); // |v - median|, v
    std::vector<double> column(selected.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        for (std::size_t i = 0; i < selected.size(); ++i) column[i] = selected[i][j];
        std::vector<double> sorted = column;
        std::sort(sorted.begin(), sorted.end());
        std::size_t m = sorted.size();
        double med = (m % 2 == 1) ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
        for (std::size_t i = 0; i < column.size(); ++i)
            ranked[i] = {std::fabs(column[i] - med), column[i]};
        std::sort(ranked.begin(), ranked.end());
        double acc = 0;
        for (std::size_t i = 0; i < beta; ++i) acc += ranked[i].second;
        out[j] = acc / static_cast<double>(beta);
    }
    return out;
}

} // namespace

std::size_t krum_select(std::span<const ModelVector> models, unsigned f) {
    std::size_t n = models.size();
    if (n < static_cast<std::size_t>(f) + 3)
        throw ConfigError("krum: needs n >= f + 3 models");
    return krum_select_impl(models, n - f - 2);
}

ModelVector aggregate_plain(const AggregationRule& rule, std::span<const ModelVector> models,
                            const AggregationContext& ctx) {
    if (models.empty()) throw ConfigError("aggregate: no models");
    for (const ModelVector& m : models) {
        if (m.size() != models.front().size())
            throw std::invalid_argument("aggregate: model dimension mismatch");
    }
    switch (rule.variant) {
        case AggregationVariant::FedAvg:
            return coordinate_mean(models);
        case AggregationVariant::Median:
            return coordinate_median(models);
        case AggregationVariant::Krum:
            return models[krum_select(models, rule.f)];
        case AggregationVariant::Bulyan:
            return bulyan(models, rule.f);
        case AggregationVariant::FlTrust:
            return fltrust(models, ctx);
        case AggregationVariant::BpflMaskedSum:
            throw ConfigError("aggregate_plain: bpfl-masked-sum operates on encoded vectors");
    }
    throw ConfigError("aggregate: unknown rule");
}

EncodedSum aggregate_masked(const Field& field, std::span<const std::vector<Fe>> masked_models) {
    if (masked_models.empty()) throw ConfigError("aggregate_masked: no models");
    EncodedSum out;
    out.sum.assign(masked_models.front().size(), field.zero());
    for (const std::vector<Fe>& m : masked_models) {
        if (m.size() != out.sum.size())
            throw std::invalid_argument("aggregate_masked: dimension mismatch");
        for (std::size_t j = 0; j < m.size(); ++j) out.sum[j] = field.add(out.sum[j], m[j]);
    }
    out.count = static_cast<std::uint32_t>(masked_models.size());
    return out;
}

ModelVector unmask_global(const Field& field, const FixedPointCodec& codec, const EncodedSum& agg,
                          std::span<const Fe> mask) {
    if (agg.count == 0) throw ProtocolError("unmask: accepted count is zero");
    if (mask.size() != agg.sum.size()) throw std::invalid_argument("unmask: mask length mismatch");
    mpz_class bound = mpz_class(agg.count) * codec.max_magnitude();
    Fe count_fe = field.from_u64(agg.count);
    ModelVector out(agg.sum.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        Fe plain = field.sub(agg.sum[j], field.mul(count_fe, mask[j]));
        mpz_class lift = field.signed_lift(plain);
        if (lift > bound || lift < -bound)
            throw ProtocolError("unmask: coordinate outside the aggregate range");
        out[j] = lift.get_d() / (static_cast<double>(codec.scale) * agg.count);
    }
    return out;
}

} // namespace bpfl

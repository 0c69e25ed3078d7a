#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bpfl {

using ModelVector = std::vector<double>;

/// Row-major feature matrix with integer class labels.
struct Dataset {
    std::size_t feature_dim = 0;
    std::size_t num_classes = 0;
    std::vector<double> features; ///< n * feature_dim
    std::vector<int> labels;      ///< n

    std::size_t size() const { return labels.size(); }
    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * feature_dim, feature_dim};
    }
};

enum class ModelFamily { Logistic, Mlp };

struct ModelSpec {
    ModelFamily family = ModelFamily::Logistic;
    std::size_t features = 0;
    std::size_t classes = 0;
    std::size_t hidden = 16; ///< MLP only

    std::size_t dim() const;
};

struct TrainingTask {
    Dataset data;
    ModelSpec model;
    unsigned epochs = 5;
    double learning_rate = 0.1;
};

ModelVector zero_model(const ModelSpec& spec);

/// Per-sample SGD for `epochs` passes with a seeded shuffle; deterministic
/// under a fixed seed. The result is clipped coordinate-wise to
/// [-clip_bound, clip_bound]. Throws std::invalid_argument on a dimension
/// mismatch.
ModelVector train_local(const TrainingTask& task, const ModelVector& start, std::uint64_t seed,
                        double clip_bound);

/// Mean cross-entropy of the model on a dataset.
double model_loss(const ModelSpec& spec, const ModelVector& w, const Dataset& data);

/// Fraction of correct argmax predictions; throws on an empty test set.
double evaluate(const ModelSpec& spec, const ModelVector& w, const Dataset& test);

/// Class logits for one sample.
std::vector<double> forward_logits(const ModelSpec& spec, const ModelVector& w,
                                   std::span<const double> x);

double cosine_similarity(std::span<const double> u, std::span<const double> v);
double euclidean_distance(std::span<const double> u, std::span<const double> v);

/// Direct evaluation of the validity predicate on plain weights:
/// distance(w_i, w_S) <= tau_e and cosine(w_i, w_S) >= tau_c.
bool plain_validity_check(std::span<const double> w_i, std::span<const double> w_s, double tau_c,
                          double tau_e);

} // namespace bpfl

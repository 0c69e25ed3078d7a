#include "bpfl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bpfl/rng.hpp"

namespace bpfl {

std::size_t ModelSpec::dim() const {
    switch (family) {
        case ModelFamily::Logistic:
            return features * classes + classes;
        case ModelFamily::Mlp:
            return hidden * features + hidden + classes * hidden + classes;
    }
    return 0;
}

ModelVector zero_model(const ModelSpec& spec) { return ModelVector(spec.dim(), 0.0); }

namespace {

void softmax_in_place(std::vector<double>& z) {
    double m = *std::max_element(z.begin(), z.end());
    double sum = 0;
    for (double& v : z) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

// Logistic layout: [W (classes x features) row-major][b (classes)]
// MLP layout: [W1 (hidden x features)][b1 (hidden)][W2 (classes x hidden)][b2 (classes)]

std::vector<double> logits_logistic(const ModelSpec& s, const ModelVector& w,
                                    std::span<const double> x) {
    std::vector<double> z(s.classes);
    const double* bias = w.data() + s.classes * s.features;
    for (std::size_t c = 0; c < s.classes; ++c) {
        const double* row = w.data() + c * s.features;
        double acc = bias[c];
        for (std::size_t j = 0; j < s.features; ++j) acc += row[j] * x[j];
        z[c] = acc;
    }
    return z;
}

struct MlpActivations {
    std::vector<double> hidden; ///< tanh outputs
    std::vector<double> logits;
};

MlpActivations mlp_forward(const ModelSpec& s, const ModelVector& w, std::span<const double> x) {
    MlpActivations act;
    act.hidden.resize(s.hidden);
    act.logits.resize(s.classes);
    const double* w1 = w.data();
    const double* b1 = w1 + s.hidden * s.features;
    const double* w2 = b1 + s.hidden;
    const double* b2 = w2 + s.classes * s.hidden;
    for (std::size_t h = 0; h < s.hidden; ++h) {
        double acc = b1[h];
        const double* row = w1 + h * s.features;
        for (std::size_t j = 0; j < s.features; ++j) acc += row[j] * x[j];
        act.hidden[h] = std::tanh(acc);
    }
    for (std::size_t c = 0; c < s.classes; ++c) {
        double acc = b2[c];
        const double* row = w2 + c * s.hidden;
        for (std::size_t h = 0; h < s.hidden; ++h) acc += row[h] * act.hidden[h];
        act.logits[c] = acc;
    }
    return act;
}

void sgd_step(const ModelSpec& s, ModelVector& w, std::span<const double> x, int label,
              double lr) {
    if (s.family == ModelFamily::Logistic) {
        std::vector<double> p = logits_logistic(s, w, x);
        softmax_in_place(p);
        double* bias = w.data() + s.classes * s.features;
        for (std::size_t c = 0; c < s.classes; ++c) {
            double g = p[c] - (static_cast<int>(c) == label ? 1.0 : 0.0);
            double* row = w.data() + c * s.features;
            for (std::size_t j = 0; j < s.features; ++j) row[j] -= lr * g * x[j];
            bias[c] -= lr * g;
        }
        return;
    }
    MlpActivations act = mlp_forward(s, w, x);
    std::vector<double> p = act.logits;
    softmax_in_place(p);
    double* w1 = w.data();
    double* b1 = w1 + s.hidden * s.features;
    double* w2 = b1 + s.hidden;
    double* b2 = w2 + s.classes * s.hidden;
    std::vector<double> dh(s.hidden, 0.0);
    for (std::size_t c = 0; c < s.classes; ++c) {
        double g = p[c] - (static_cast<int>(c) == label ? 1.0 : 0.0);
        double* row = w2 + c * s.hidden;
        for (std::size_t h = 0; h < s.hidden; ++h) {
            dh[h] += g * row[h];
            row[h] -= lr * g * act.hidden[h];
        }
        b2[c] -= lr * g;
    }
    for (std::size_t h = 0; h < s.hidden; ++h) {
        double g = dh[h] * (1.0 - act.hidden[h] * act.hidden[h]);
        double* row = w1 + h * s.features;
        for (std::size_t j = 0; j < s.features; ++j) row[j] -= lr * g * x[j];
        b1[h] -= lr * g;
    }
}

} // namespace

std::vector<double> forward_logits(const ModelSpec& spec, const ModelVector& w,
                                   std::span<const double> x) {
    if (w.size() != spec.dim()) throw std::invalid_argument("forward: model size mismatch");
    if (spec.family == ModelFamily::Logistic) return logits_logistic(spec, w, x);
    return mlp_forward(spec, w, x).logits;
}

ModelVector train_local(const TrainingTask& task, const ModelVector& start, std::uint64_t seed,
                        double clip_bound) {
    const ModelSpec& s = task.model;
    if (start.size() != s.dim())
        throw std::invalid_argument("train_local: start model does not match the model family");
    if (task.data.feature_dim != s.features || task.data.num_classes > s.classes)
        throw std::invalid_argument("train_local: dataset does not match the model family");
    ModelVector w = start;
    Rng rng(seed);
    std::vector<std::size_t> order(task.data.size());
    std::iota(order.begin(), order.end(), 0);
    for (unsigned epoch = 0; epoch < task.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.below(i)]);
        }
        for (std::size_t i : order) {
            sgd_step(s, w, task.data.row(i), task.data.labels[i], task.learning_rate);
        }
    }
    for (double& v : w) v = std::clamp(v, -clip_bound, clip_bound);
    return w;
}

double model_loss(const ModelSpec& spec, const ModelVector& w, const Dataset& data) {
    if (data.size() == 0) throw std::invalid_argument("model_loss: empty dataset");
    double total = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::vector<double> p = forward_logits(spec, w, data.row(i));
        softmax_in_place(p);
        double prob = std::max(p[static_cast<std::size_t>(data.labels[i])], 1e-12);
        total -= std::log(prob);
    }
    return total / static_cast<double>(data.size());
}

double evaluate(const ModelSpec& spec, const ModelVector& w, const Dataset& test) {
    if (test.size() == 0) throw std::invalid_argument("evaluate: empty test set");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        std::vector<double> z = forward_logits(spec, w, test.row(i));
        auto arg = std::distance(z.begin(), std::max_element(z.begin(), z.end()));
        if (arg == test.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw std::invalid_argument("cosine: length mismatch");
    double dot = 0, nu = 0, nv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0 || nv == 0) throw std::domain_error("cosine: undefined for a zero vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double euclidean_distance(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw std::invalid_argument("distance: length mismatch");
    double acc = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double d = u[i] - v[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

bool plain_validity_check(std::span<const double> w_i, std::span<const double> w_s, double tau_c,
                          double tau_e) {
    return euclidean_distance(w_i, w_s) <= tau_e && cosine_similarity(w_i, w_s) >= tau_c;
}

} // namespace bpfl

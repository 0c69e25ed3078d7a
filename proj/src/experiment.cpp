#include "bpfl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bpfl/errors.hpp"
#include "bpfl/idx.hpp"

extern char** environ;

namespace bpfl {

using nlohmann::json;

// ---------------------------------------------------------------------------
// data generation
// ---------------------------------------------------------------------------

namespace {

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
}

DataPartitions partition_pool(Dataset pool, Dataset test, std::size_t n_clients,
                              std::size_t server_samples, Rng& rng) {
    if (pool.size() <= server_samples)
        throw ConfigError("dataset: training pool smaller than the server validation split");
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle_indices(order, rng);

    auto take = [&](std::size_t from, std::size_t count) {
        Dataset d;
        d.feature_dim = pool.feature_dim;
        d.num_classes = pool.num_classes;
        d.features.reserve(count * pool.feature_dim);
        d.labels.reserve(count);
        for (std::size_t i = from; i < from + count; ++i) {
            auto row = pool.row(order[i]);
            d.features.insert(d.features.end(), row.begin(), row.end());
            d.labels.push_back(pool.labels[order[i]]);
        }
        return d;
    };

    DataPartitions parts;
    parts.server_validation = take(0, server_samples);
    std::size_t remaining = pool.size() - server_samples;
    std::size_t shard = remaining / n_clients;
    if (shard == 0) throw ConfigError("dataset: not enough samples for the client count");
    parts.clients.reserve(n_clients);
    for (std::size_t c = 0; c < n_clients; ++c) {
        parts.clients.push_back(take(server_samples + c * shard, shard));
    }
    parts.test = std::move(test);
    return parts;
}

} // namespace

DataPartitions generate_synthetic(const SyntheticSpec& spec, std::size_t n_clients,
                                  std::size_t server_samples, std::uint64_t seed) {
    if (spec.classes < 2 || spec.features < 1 || spec.per_class < 1)
        throw ConfigError("synthetic: classes, features and per_class must be >= 1");
    if (n_clients < 1 || spec.classes * spec.per_class < n_clients)
        throw ConfigError("synthetic: not enough samples for the client count");
    Rng rng = Rng(seed).child(0x5d);
    auto mean_of = [&](std::size_t c) {
        std::vector<double> m(spec.features, 0.0);
        double sign = c < spec.features ? 1.0 : -1.0;
        m[c % spec.features] = sign * spec.separation;
        return m;
    };
    auto sample_class = [&](Dataset& d, std::size_t c, std::size_t count, Rng& r) {
        std::vector<double> mu = mean_of(c);
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t j = 0; j < spec.features; ++j)
                d.features.push_back(mu[j] + r.normal());
            d.labels.push_back(static_cast<int>(c));
        }
    };

    // client pool: classes * per_class samples, shuffled and split evenly
    Dataset pool;
    pool.feature_dim = spec.features;
    pool.num_classes = spec.classes;
    for (std::size_t c = 0; c < spec.classes; ++c) sample_class(pool, c, spec.per_class, rng);

    DataPartitions parts;
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng = Rng(seed).child(0x91);
    shuffle_indices(order, split_rng);
    std::size_t shard = pool.size() / n_clients;
    parts.clients.reserve(n_clients);
    for (std::size_t c = 0; c < n_clients; ++c) {
        Dataset d;
        d.feature_dim = pool.feature_dim;
        d.num_classes = pool.num_classes;
        for (std::size_t i = c * shard; i < (c + 1) * shard; ++i) {
            auto row = pool.row(order[i]);
            d.features.insert(d.features.end(), row.begin(), row.end());
            d.labels.push_back(pool.labels[order[i]]);
        }
        parts.clients.push_back(std::move(d));
    }

    // D_S: an additional uniform draw from the same blobs
    parts.server_validation.feature_dim = spec.features;
    parts.server_validation.num_classes = spec.classes;
    Rng ds_rng = Rng(seed).child(0x6a);
    for (std::size_t i = 0; i < server_samples; ++i) {
        std::size_t c = ds_rng.below(spec.classes);
        sample_class(parts.server_validation, c, 1, ds_rng);
    }

    parts.test.feature_dim = spec.features;
    parts.test.num_classes = spec.classes;
    Rng test_rng = Rng(seed).child(0x7e);
    for (std::size_t c = 0; c < spec.classes; ++c)
        sample_class(parts.test, c, spec.test_per_class, test_rng);
    return parts;
}

namespace {

Dataset mnist_dataset(const std::string& dir, const char* image_file, const char* label_file,
                      std::size_t subset) {
    namespace fs = std::filesystem;
    fs::path images_path = fs::path(dir) / image_file;
    fs::path labels_path = fs::path(dir) / label_file;
    if (!fs::exists(images_path) || !fs::exists(labels_path))
        throw ConfigError("mnist: missing " + images_path.string() + " or " +
                          labels_path.string());
    IdxTensor images = parse_idx_file(images_path.string());
    IdxTensor labels = parse_idx_file(labels_path.string());
    if (images.dims.size() != 3) throw FormatError("mnist: image tensor must have rank 3");
    if (labels.dims.size() != 1) throw FormatError("mnist: label tensor must have rank 1");
    if (images.dims[0] != labels.dims[0]) throw FormatError("mnist: image/label count mismatch");
    std::size_t count = std::min<std::size_t>(subset, images.dims[0]);
    std::size_t pixels = std::size_t(images.dims[1]) * images.dims[2];
    Dataset d;
    d.feature_dim = pixels;
    d.num_classes = 10;
    d.features.reserve(count * pixels);
    d.labels.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t p = 0; p < pixels; ++p)
            d.features.push_back(images.data[i * pixels + p] / 255.0);
        d.labels.push_back(labels.data[i]);
    }
    return d;
}

} // namespace

DataPartitions load_mnist(const MnistSpec& spec, std::size_t n_clients,
                          std::size_t server_samples, std::uint64_t seed) {
    Dataset pool =
        mnist_dataset(spec.dir, "train-images-idx3-ubyte", "train-labels-idx1-ubyte", spec.subset);
    Dataset test = mnist_dataset(spec.dir, "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte",
                                 spec.test_subset);
    Rng split_rng = Rng(seed).child(0x91);
    return partition_pool(std::move(pool), std::move(test), n_clients, server_samples, split_rng);
}

DataPartitions make_partitions(const ExperimentConfig& cfg, std::uint64_t seed) {
    if (cfg.dataset.source == DatasetConfig::Source::Synthetic) {
        return generate_synthetic(cfg.dataset.synthetic, cfg.n, cfg.dataset.server_samples, seed);
    }
    return load_mnist(cfg.dataset.mnist, cfg.n, cfg.dataset.server_samples, seed);
}

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            fail(path.empty() ? key : path + "." + key, "unknown key");
    }
}

template <typename T>
T get_or(const json& obj, const std::string& path, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(path.empty() ? key : path + "." + key, e.what());
    }
}

AttackVariant attack_variant_from(const std::string& s, const std::string& path) {
    if (s == "none") return AttackVariant::None;
    if (s == "add_noise") return AttackVariant::AddNoise;
    if (s == "sign_flip") return AttackVariant::SignFlip;
    if (s == "min_max") return AttackVariant::MinMax;
    if (s == "min_sum") return AttackVariant::MinSum;
    if (s == "forged_proof") return AttackVariant::ForgedProof;
    if (s == "bad_mask_op") return AttackVariant::BadMaskOp;
    if (s == "wrong_mask_vector") return AttackVariant::WrongMaskVector;
    if (s == "invalid_model") return AttackVariant::InvalidModel;
    fail(path, "unknown attack variant '" + s + "'");
}

std::string attack_variant_name(AttackVariant v) {
    switch (v) {
        case AttackVariant::None: return "none";
        case AttackVariant::AddNoise: return "add_noise";
        case AttackVariant::SignFlip: return "sign_flip";
        case AttackVariant::MinMax: return "min_max";
        case AttackVariant::MinSum: return "min_sum";
        case AttackVariant::ForgedProof: return "forged_proof";
        case AttackVariant::BadMaskOp: return "bad_mask_op";
        case AttackVariant::WrongMaskVector: return "wrong_mask_vector";
        case AttackVariant::InvalidModel: return "invalid_model";
    }
    return "none";
}

AggregationVariant rule_from(const std::string& s, const std::string& path) {
    if (s == "fedavg") return AggregationVariant::FedAvg;
    if (s == "krum") return AggregationVariant::Krum;
    if (s == "median") return AggregationVariant::Median;
    if (s == "bulyan") return AggregationVariant::Bulyan;
    if (s == "fltrust") return AggregationVariant::FlTrust;
    if (s == "bpfl") return AggregationVariant::BpflMaskedSum;
    fail(path, "unknown aggregation rule '" + s + "'");
}

std::string rule_name(AggregationVariant v) {
    switch (v) {
        case AggregationVariant::FedAvg: return "fedavg";
        case AggregationVariant::Krum: return "krum";
        case AggregationVariant::Median: return "median";
        case AggregationVariant::Bulyan: return "bulyan";
        case AggregationVariant::FlTrust: return "fltrust";
        case AggregationVariant::BpflMaskedSum: return "bpfl";
    }
    return "bpfl";
}

std::string git_describe() {
    FILE* pipe = ::popen("git describe --always --dirty 2>/dev/null", "r");
    if (!pipe) return "unknown";
    char buf[128] = {0};
    std::string out;
    while (fgets(buf, sizeof buf, pipe)) out += buf;
    ::pclose(pipe);
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    return out.empty() ? "unknown" : out;
}

} // namespace

ExperimentConfig parse_config(const json& doc) {
    ExperimentConfig cfg;
    check_keys(doc, "",
               {"n", "rounds", "seed", "seeds", "aggregation", "attack", "model", "training",
                "thresholds", "fixed_point", "field", "hash", "paillier_bits", "mask",
                "comparison", "dataset", "transport"});

    cfg.n = get_or<std::size_t>(doc, "", "n", cfg.n);
    if (cfg.n < 1) fail("n", "need at least one client");
    cfg.rounds = get_or<unsigned>(doc, "", "rounds", cfg.rounds);
    if (doc.contains("seeds")) {
        cfg.seeds = get_or<std::vector<std::uint64_t>>(doc, "", "seeds", cfg.seeds);
        if (cfg.seeds.empty()) fail("seeds", "must list at least one seed");
    } else if (doc.contains("seed")) {
        cfg.seeds = {get_or<std::uint64_t>(doc, "", "seed", 1)};
    }

    if (doc.contains("aggregation")) {
        const json& agg = doc.at("aggregation");
        check_keys(agg, "aggregation", {"rule", "f"});
        cfg.rule.variant =
            rule_from(get_or<std::string>(agg, "aggregation", "rule", "bpfl"), "aggregation.rule");
        cfg.rule.f = get_or<unsigned>(agg, "aggregation", "f", 0);
    }

    if (doc.contains("attack")) {
        const json& atk = doc.at("attack");
        check_keys(atk, "attack",
                   {"variant", "fraction", "noise_sigma", "flip_scale", "perturbation",
                    "gamma_grid", "wrong_setup_hash"});
        cfg.attack.variant = attack_variant_from(
            get_or<std::string>(atk, "attack", "variant", "none"), "attack.variant");
        cfg.attack.fraction = get_or<double>(atk, "attack", "fraction", 0.0);
        if (cfg.attack.fraction < 0 || cfg.attack.fraction >= 0.5)
            fail("attack.fraction",
                 "the threat model requires the malicious fraction to stay below 50%");
        cfg.attack.noise_sigma = get_or<double>(atk, "attack", "noise_sigma", 1.0);
        cfg.attack.flip_scale = get_or<double>(atk, "attack", "flip_scale", 1.0);
        std::string pert = get_or<std::string>(atk, "attack", "perturbation", "neg_unit_mean");
        if (pert == "neg_unit_mean") cfg.attack.perturbation = Perturbation::NegUnitMean;
        else if (pert == "neg_sign") cfg.attack.perturbation = Perturbation::NegSign;
        else if (pert == "neg_std") cfg.attack.perturbation = Perturbation::NegStd;
        else fail("attack.perturbation", "unknown perturbation '" + pert + "'");
        cfg.attack.gamma_grid =
            get_or<std::vector<double>>(atk, "attack", "gamma_grid", cfg.attack.gamma_grid);
        cfg.attack.wrong_setup_hash = get_or<bool>(atk, "attack", "wrong_setup_hash", false);
    }

    if (doc.contains("model")) {
        const json& m = doc.at("model");
        check_keys(m, "model", {"family", "features", "classes", "hidden"});
        std::string family = get_or<std::string>(m, "model", "family", "logistic");
        if (family == "logistic") cfg.model.family = ModelFamily::Logistic;
        else if (family == "mlp") cfg.model.family = ModelFamily::Mlp;
        else fail("model.family", "unknown family '" + family + "'");
        cfg.model.features = get_or<std::size_t>(m, "model", "features", cfg.model.features);
        cfg.model.classes = get_or<std::size_t>(m, "model", "classes", cfg.model.classes);
        cfg.model.hidden = get_or<std::size_t>(m, "model", "hidden", cfg.model.hidden);
        if (cfg.model.features == 0 || cfg.model.classes < 2)
            fail("model", "need features >= 1 and classes >= 2");
    }

    if (doc.contains("training")) {
        const json& t = doc.at("training");
        check_keys(t, "training", {"local_epochs", "learning_rate"});
        cfg.local_epochs = get_or<unsigned>(t, "training", "local_epochs", cfg.local_epochs);
        cfg.learning_rate = get_or<double>(t, "training", "learning_rate", cfg.learning_rate);
    }

    if (doc.contains("thresholds")) {
        const json& t = doc.at("thresholds");
        check_keys(t, "thresholds", {"tau_c", "tau_e"});
        cfg.tau_c = get_or<double>(t, "thresholds", "tau_c", cfg.tau_c);
        cfg.tau_e = get_or<double>(t, "thresholds", "tau_e", cfg.tau_e);
        if (cfg.tau_c < -1 || cfg.tau_c > 1) fail("thresholds.tau_c", "must lie in [-1, 1]");
        if (cfg.tau_e < 0) fail("thresholds.tau_e", "must be >= 0");
    }

    if (doc.contains("fixed_point")) {
        const json& fp = doc.at("fixed_point");
        check_keys(fp, "fixed_point", {"scale", "weight_bound"});
        cfg.scale = get_or<std::uint64_t>(fp, "fixed_point", "scale", cfg.scale);
        cfg.weight_bound = get_or<double>(fp, "fixed_point", "weight_bound", cfg.weight_bound);
    }

    if (doc.contains("field")) {
        const json& fl = doc.at("field");
        check_keys(fl, "field", {"modulus", "two_adicity", "hash_exponent"});
        cfg.field_params.modulus_dec =
            get_or<std::string>(fl, "field", "modulus", cfg.field_params.modulus_dec);
        cfg.field_params.two_adicity =
            get_or<unsigned>(fl, "field", "two_adicity", cfg.field_params.two_adicity);
        cfg.field_params.hash_exponent =
            get_or<unsigned>(fl, "field", "hash_exponent", cfg.field_params.hash_exponent);
    }

    if (doc.contains("hash")) {
        const json& h = doc.at("hash");
        check_keys(h, "hash", {"rounds", "constants_seed"});
        cfg.hash_rounds = get_or<unsigned>(h, "hash", "rounds", cfg.hash_rounds);
        cfg.hash_constants_seed =
            get_or<std::string>(h, "hash", "constants_seed", cfg.hash_constants_seed);
    }

    cfg.paillier_bits = get_or<unsigned>(doc, "", "paillier_bits", cfg.paillier_bits);

    if (doc.contains("mask")) {
        const json& m = doc.at("mask");
        check_keys(m, "mask", {"renegotiate"});
        cfg.renegotiate_mask = get_or<bool>(m, "mask", "renegotiate", false);
    }

    if (doc.contains("comparison")) {
        std::string mode = get_or<std::string>(doc, "", "comparison", "model");
        if (mode == "model") cfg.comparison = ComparisonMode::Model;
        else if (mode == "update") cfg.comparison = ComparisonMode::Update;
        else fail("comparison", "must be 'model' or 'update'");
    }

    if (doc.contains("dataset")) {
        const json& ds = doc.at("dataset");
        check_keys(ds, "dataset",
                   {"source", "classes", "features", "per_class", "separation", "test_per_class",
                    "dir", "subset", "test_subset", "server_samples"});
        std::string source = get_or<std::string>(ds, "dataset", "source", "synthetic");
        if (source == "synthetic") {
            cfg.dataset.source = DatasetConfig::Source::Synthetic;
            auto& s = cfg.dataset.synthetic;
            s.classes = get_or<std::size_t>(ds, "dataset", "classes", s.classes);
            s.features = get_or<std::size_t>(ds, "dataset", "features", s.features);
            s.per_class = get_or<std::size_t>(ds, "dataset", "per_class", s.per_class);
            s.separation = get_or<double>(ds, "dataset", "separation", s.separation);
            s.test_per_class = get_or<std::size_t>(ds, "dataset", "test_per_class", s.test_per_class);
        } else if (source == "mnist_idx") {
            cfg.dataset.source = DatasetConfig::Source::MnistIdx;
            auto& m = cfg.dataset.mnist;
            m.dir = get_or<std::string>(ds, "dataset", "dir", m.dir);
            m.subset = get_or<std::size_t>(ds, "dataset", "subset", m.subset);
            m.test_subset = get_or<std::size_t>(ds, "dataset", "test_subset", m.test_subset);
            if (m.dir.empty()) fail("dataset.dir", "mnist_idx requires a directory");
        } else {
            fail("dataset.source", "must be 'synthetic' or 'mnist_idx'");
        }
        cfg.dataset.server_samples =
            get_or<std::size_t>(ds, "dataset", "server_samples", cfg.dataset.server_samples);
    }

    cfg.transport = get_or<std::string>(doc, "", "transport", cfg.transport);
    if (cfg.transport != "inproc" && cfg.transport != "tcp")
        fail("transport", "must be 'inproc' or 'tcp'");

    // cross-field checks
    if (cfg.dataset.source == DatasetConfig::Source::Synthetic) {
        if (cfg.dataset.synthetic.features != cfg.model.features ||
            cfg.dataset.synthetic.classes != cfg.model.classes)
            fail("dataset", "synthetic feature/class shape must match the model");
    }
    if (cfg.rule.variant == AggregationVariant::BpflMaskedSum &&
        cfg.comparison == ComparisonMode::Update)
        fail("comparison",
             "update-mode comparison is plaintext-baseline only: the server cannot form the "
             "reference update without unmasking the global model");
    return cfg;
}

ExperimentConfig config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config: invalid JSON in " + path + ": " + e.what());
    }
    apply_env_overrides(doc);
    return parse_config(doc);
}

std::vector<std::string> preset_names() {
    return {"honest-smoke", "signflip-20pct", "paper-defaults", "paper-cifar-thresholds",
            "mnist-smoke"};
}

ExperimentConfig preset(const std::string& name) {
    json doc;
    if (name == "honest-smoke") {
        doc = json{{"n", 5},
                   {"rounds", 10},
                   {"model", {{"features", 31}, {"classes", 2}}},
                   {"dataset", {{"features", 31}, {"classes", 2}, {"per_class", 150}, {"server_samples", 60}}},
                   {"thresholds", {{"tau_c", 0.95}, {"tau_e", 5.0}}}};
    } else if (name == "signflip-20pct") {
        doc = json{{"n", 10},
                   {"rounds", 5},
                   {"attack", {{"variant", "sign_flip"}, {"fraction", 0.2}}},
                   {"model", {{"features", 31}, {"classes", 2}}},
                   {"dataset", {{"features", 31}, {"classes", 2}, {"per_class", 300}, {"server_samples", 100}}},
                   {"thresholds", {{"tau_c", 0.95}, {"tau_e", 5.0}}}};
    } else if (name == "paper-defaults") {
        // tau_c = 0.99, tau_e = 0.93, |D_S| = 200, 5 local epochs, 300 rounds
        doc = json{{"n", 10},
                   {"rounds", 300},
                   {"model", {{"features", 31}, {"classes", 2}}},
                   {"dataset", {{"features", 31}, {"classes", 2}, {"per_class", 1200}, {"server_samples", 200}}},
                   {"training", {{"local_epochs", 5}}},
                   {"thresholds", {{"tau_c", 0.99}, {"tau_e", 0.93}}}};
    } else if (name == "paper-cifar-thresholds") {
        // the paper's CIFAR-10 setting uses tau_e = 30.00
        doc = json{{"n", 10},
                   {"rounds", 50},
                   {"model", {{"features", 31}, {"classes", 2}}},
                   {"dataset", {{"features", 31}, {"classes", 2}, {"per_class", 600}, {"server_samples", 200}}},
                   {"thresholds", {{"tau_c", 0.99}, {"tau_e", 30.0}}}};
    } else if (name == "mnist-smoke") {
        doc = json{{"n", 10},
                   {"rounds", 8},
                   {"model", {{"features", 784}, {"classes", 10}}},
                   {"dataset",
                    {{"source", "mnist_idx"}, {"dir", "data/mnist"}, {"subset", 2000},
                     {"server_samples", 200}}},
                   {"training", {{"local_epochs", 2}, {"learning_rate", 0.05}}},
                   {"thresholds", {{"tau_c", 0.5}, {"tau_e", 12.0}}}};
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    apply_env_overrides(doc);
    return parse_config(doc);
}

json resolved_json(const ExperimentConfig& cfg) {
    json doc;
    doc["n"] = cfg.n;
    doc["rounds"] = cfg.rounds;
    doc["seeds"] = cfg.seeds;
    doc["aggregation"] = {{"rule", rule_name(cfg.rule.variant)}, {"f", cfg.rule.f}};
    doc["attack"] = {{"variant", attack_variant_name(cfg.attack.variant)},
                     {"fraction", cfg.attack.fraction},
                     {"noise_sigma", cfg.attack.noise_sigma},
                     {"flip_scale", cfg.attack.flip_scale},
                     {"perturbation", cfg.attack.perturbation == Perturbation::NegUnitMean
                                          ? "neg_unit_mean"
                                          : (cfg.attack.perturbation == Perturbation::NegSign
                                                 ? "neg_sign"
                                                 : "neg_std")},
                     {"gamma_grid", cfg.attack.gamma_grid},
                     {"wrong_setup_hash", cfg.attack.wrong_setup_hash}};
    doc["model"] = {{"family", cfg.model.family == ModelFamily::Logistic ? "logistic" : "mlp"},
                    {"features", cfg.model.features},
                    {"classes", cfg.model.classes},
                    {"hidden", cfg.model.hidden}};
    doc["training"] = {{"local_epochs", cfg.local_epochs}, {"learning_rate", cfg.learning_rate}};
    doc["thresholds"] = {{"tau_c", cfg.tau_c}, {"tau_e", cfg.tau_e}};
    doc["fixed_point"] = {{"scale", cfg.scale}, {"weight_bound", cfg.weight_bound}};
    doc["field"] = {{"modulus", cfg.field_params.modulus_dec},
                    {"two_adicity", cfg.field_params.two_adicity},
                    {"hash_exponent", cfg.field_params.hash_exponent}};
    doc["hash"] = {{"rounds", cfg.hash_rounds}, {"constants_seed", cfg.hash_constants_seed}};
    doc["paillier_bits"] = cfg.paillier_bits;
    doc["mask"] = {{"renegotiate", cfg.renegotiate_mask}};
    doc["comparison"] = cfg.comparison == ComparisonMode::Model ? "model" : "update";
    if (cfg.dataset.source == DatasetConfig::Source::Synthetic) {
        doc["dataset"] = {{"source", "synthetic"},
                          {"classes", cfg.dataset.synthetic.classes},
                          {"features", cfg.dataset.synthetic.features},
                          {"per_class", cfg.dataset.synthetic.per_class},
                          {"separation", cfg.dataset.synthetic.separation},
                          {"test_per_class", cfg.dataset.synthetic.test_per_class},
                          {"server_samples", cfg.dataset.server_samples}};
    } else {
        doc["dataset"] = {{"source", "mnist_idx"},
                          {"dir", cfg.dataset.mnist.dir},
                          {"subset", cfg.dataset.mnist.subset},
                          {"test_subset", cfg.dataset.mnist.test_subset},
                          {"server_samples", cfg.dataset.server_samples}};
    }
    doc["transport"] = cfg.transport;
    return doc;
}

void apply_env_overrides(json& doc) {
    // candidate env name for every known leaf path of the resolved schema
    json defaults = resolved_json(ExperimentConfig{});
    std::map<std::string, std::string> names; // ENV name -> json pointer
    std::function<void(const json&, const std::string&, const std::string&)> walk =
        [&](const json& node, const std::string& pointer, const std::string& env) {
            if (node.is_object()) {
                for (const auto& [key, value] : node.items()) {
                    std::string upper = key;
                    std::transform(upper.begin(), upper.end(), upper.begin(), ::toupper);
                    walk(value, pointer + "/" + key, env + "_" + upper);
                }
                return;
            }
            names["BPFL" + env] = pointer;
        };
    walk(defaults, "", "");
    names["BPFL_SEED"] = "/seed";
    names["BPFL_SEEDS"] = "/seeds";

    for (char** env = environ; *env != nullptr; ++env) {
        std::string entry(*env);
        if (entry.rfind("BPFL_", 0) != 0) continue;
        std::size_t eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string key = entry.substr(0, eq);
        std::string value = entry.substr(eq + 1);
        auto it = names.find(key);
        if (it == names.end()) throw ConfigError("config: unknown override " + key);
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::exception&) {
            parsed = value; // plain string
        }
        doc[json::json_pointer(it->second)] = parsed;
    }
}

// ---------------------------------------------------------------------------
// execution
// ---------------------------------------------------------------------------

namespace {

double median_of(std::vector<double> xs) {
    if (xs.empty()) return 0;
    std::sort(xs.begin(), xs.end());
    std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

ProtocolConfig protocol_config_of(const ExperimentConfig& cfg, std::uint64_t seed) {
    ProtocolConfig pc;
    pc.n = cfg.n;
    pc.field_params = cfg.field_params;
    pc.scale = cfg.scale;
    pc.weight_bound = cfg.weight_bound;
    pc.hash_rounds = cfg.hash_rounds;
    pc.hash_constants_seed = cfg.hash_constants_seed;
    pc.model = cfg.model;
    pc.local_epochs = cfg.local_epochs;
    pc.learning_rate = cfg.learning_rate;
    pc.tau_c = cfg.tau_c;
    pc.tau_e = cfg.tau_e;
    pc.paillier_bits = cfg.paillier_bits;
    pc.renegotiate_mask = cfg.renegotiate_mask;
    pc.seed = seed;
    return pc;
}

std::unique_ptr<Bus> make_bus(const ExperimentConfig& cfg) {
    if (cfg.transport == "tcp")
        return std::make_unique<TcpLoopbackBus>(static_cast<std::uint32_t>(cfg.n));
    return std::make_unique<InProcBus>();
}

/// Measurement-only privilege: the harness evaluates the global model by
/// unmasking with a client's mask; the protocol server never does this.
double eval_global(const SharedContext& ctx, const ServerState& server,
                   const ClientState& witness_client, const Dataset& test) {
    ModelVector w;
    if (server.global.count == 0) {
        w = decode_vector(*ctx.field, ctx.codec, server.global.sum);
    } else {
        w = unmask_global(*ctx.field, ctx.codec, server.global, witness_client.mask.r);
    }
    return evaluate(ctx.config.model, w, test);
}

struct BpflRunResult {
    std::vector<RoundMetrics> rounds;
    double final_accuracy = 0;
};

BpflRunResult run_bpfl_once(const ExperimentConfig& cfg, std::uint64_t seed,
                            const AttackSpec& attack) {
    DataPartitions parts = make_partitions(cfg, seed);
    std::unique_ptr<Bus> bus = make_bus(cfg);
    Simulation sim =
        run_setup(protocol_config_of(cfg, seed), std::move(parts.server_validation),
                  std::move(parts.clients), *bus, attack);
    BpflRunResult result;
    result.rounds.reserve(cfg.rounds);
    for (unsigned t = 1; t <= cfg.rounds; ++t) {
        RoundReport rep = run_round(sim.ctx, sim.server, sim.clients, attack, *bus);
        RoundMetrics m;
        m.seed = seed;
        m.round = rep.round;
        m.accepted = rep.accepted.size();
        m.accepted_ids = rep.accepted;
        for (const auto& [id, reason] : rep.rejected) m.rejected.emplace_back(id, to_string(reason));
        m.global_updated = rep.global_updated;
        m.accuracy = eval_global(sim.ctx, sim.server, sim.clients.front(), parts.test);
        m.prove_ms_median = median_of(rep.client_prove_ms);
        m.train_ms_median = median_of(rep.client_train_ms);
        m.server_train_ms = rep.server_train_ms;
        m.server_verify_ms = rep.server_verify_ms;
        m.server_aggregate_ms = rep.server_aggregate_ms;
        m.server_bytes_sent = rep.server_traffic.bytes_sent;
        m.server_bytes_received = rep.server_traffic.bytes_received;
        m.client_bytes_sent = rep.client_bytes_sent;
        m.client_bytes_received = rep.client_bytes_received;
        m.transcript_digest = rep.transcript_digest;
        result.rounds.push_back(std::move(m));
    }
    result.final_accuracy = result.rounds.empty() ? 0 : result.rounds.back().accuracy;
    return result;
}

/// Plaintext FL loop for the baseline aggregation rules.
BpflRunResult run_plain_once(const ExperimentConfig& cfg, std::uint64_t seed,
                             const AttackSpec& attack) {
    DataPartitions parts = make_partitions(cfg, seed);
    const std::size_t n = cfg.n;
    Rng init_rng = Rng(seed).child(0x01).child(0).child(0);
    ModelVector w_g(cfg.model.dim());
    for (double& v : w_g) v = init_rng.normal(0.0, 0.01);
    ModelVector w_s = w_g;

    BpflRunResult result;
    for (unsigned round = 1; round <= cfg.rounds; ++round) {
        std::vector<ModelVector> models(n);
        std::vector<double> train_ms(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            TrainingTask task{parts.clients[i], cfg.model, cfg.local_epochs, cfg.learning_rate};
            Rng rng = Rng(seed).child(0x10).child(static_cast<std::uint32_t>(i + 1)).child(round);
            models[i] = train_local(task, w_g, rng.next_u64(), cfg.weight_bound);
        }
        if (attack.variant != AttackVariant::None) {
            std::vector<ModelVector> benign;
            for (std::size_t i = 0; i < n; ++i)
                if (!attack.is_malicious(static_cast<std::uint32_t>(i + 1), n))
                    benign.push_back(models[i]);
            for (std::size_t i = 0; i < n; ++i) {
                std::uint32_t id = static_cast<std::uint32_t>(i + 1);
                if (!attack.is_malicious(id, n)) continue;
                Rng rng = Rng(seed).child(0x13).child(id).child(round);
                switch (attack.variant) {
                    case AttackVariant::AddNoise:
                        models[i] = add_noise(models[i], attack.noise_sigma, rng.next_u64());
                        break;
                    case AttackVariant::SignFlip:
                        models[i] = sign_flip(models[i]);
                        for (double& v : models[i]) v *= attack.flip_scale;
                        break;
                    case AttackVariant::MinMax:
                        models[i] = min_max_attack(benign, attack.perturbation, attack.gamma_grid);
                        break;
                    case AttackVariant::MinSum:
                        models[i] = min_sum_attack(benign, attack.perturbation, attack.gamma_grid);
                        break;
                    default:
                        // protocol-level behaviors have no plaintext analogue;
                        // model substitution mirrors their payload model
                        models[i] = sign_flip(models[i]);
                        break;
                }
                for (double& v : models[i])
                    v = std::clamp(v, -cfg.weight_bound, cfg.weight_bound);
            }
        }

        // reference model for fltrust, trained on D_S from the current global
        TrainingTask ref_task{parts.server_validation, cfg.model, cfg.local_epochs,
                              cfg.learning_rate};
        Rng ref_rng = Rng(seed).child(0x10).child(0).child(round);
        w_s = train_local(ref_task, w_g, ref_rng.next_u64(), cfg.weight_bound);

        AggregationContext agg_ctx;
        agg_ctx.current_global = &w_g;
        ModelVector next;
        if (cfg.comparison == ComparisonMode::Update) {
            std::vector<ModelVector> updates(n);
            for (std::size_t i = 0; i < n; ++i) {
                updates[i] = models[i];
                for (std::size_t j = 0; j < updates[i].size(); ++j) updates[i][j] -= w_g[j];
            }
            ModelVector ref_update = w_s;
            for (std::size_t j = 0; j < ref_update.size(); ++j) ref_update[j] -= w_g[j];
            agg_ctx.reference = &ref_update;
            ModelVector delta = aggregate_plain(cfg.rule, updates, agg_ctx);
            next = w_g;
            for (std::size_t j = 0; j < next.size(); ++j) next[j] += delta[j];
        } else {
            agg_ctx.reference = &w_s;
            next = aggregate_plain(cfg.rule, models, agg_ctx);
        }
        w_g = std::move(next);

        RoundMetrics m;
        m.seed = seed;
        m.round = round;
        m.accepted = n;
        m.accuracy = evaluate(cfg.model, w_g, parts.test);
        m.train_ms_median = median_of(train_ms);
        result.rounds.push_back(std::move(m));
    }
    result.final_accuracy = result.rounds.empty() ? 0 : result.rounds.back().accuracy;
    return result;
}

BpflRunResult run_once(const ExperimentConfig& cfg, std::uint64_t seed, const AttackSpec& attack) {
    if (cfg.rule.variant == AggregationVariant::BpflMaskedSum)
        return run_bpfl_once(cfg, seed, attack);
    return run_plain_once(cfg, seed, attack);
}

json metrics_to_json(const RoundMetrics& m) {
    json rejected = json::array();
    for (const auto& [id, reason] : m.rejected) rejected.push_back({{"id", id}, {"reason", reason}});
    json doc{{"seed", m.seed},
             {"round", m.round},
             {"accepted", m.accepted},
             {"accepted_ids", m.accepted_ids},
             {"rejected", rejected},
             {"global_updated", m.global_updated},
             {"accuracy", m.accuracy},
             {"prove_ms_median", m.prove_ms_median},
             {"train_ms_median", m.train_ms_median},
             {"server_train_ms", m.server_train_ms},
             {"server_verify_ms", m.server_verify_ms},
             {"server_aggregate_ms", m.server_aggregate_ms},
             {"server_bytes_sent", m.server_bytes_sent},
             {"server_bytes_received", m.server_bytes_received},
             {"client_bytes_sent", m.client_bytes_sent},
             {"client_bytes_received", m.client_bytes_received},
             {"transcript", m.transcript_digest}};
    if (m.attack_impact) doc["attack_impact"] = *m.attack_impact;
    return doc;
}

} // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::ofstream metrics_out;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        json resolved = resolved_json(cfg);
        resolved["provenance"] = {{"git", git_describe()}, {"seeds", cfg.seeds}};
        std::ofstream(fs::path(out_dir) / "resolved_config.json") << resolved.dump(2) << '\n';
        metrics_out.open(fs::path(out_dir) / "metrics.jsonl");
    }

    ExperimentSummary summary;
    const bool attacked = cfg.attack.variant != AttackVariant::None && cfg.attack.fraction > 0;
    for (std::uint64_t seed : cfg.seeds) {
        std::optional<BpflRunResult> baseline;
        if (attacked) {
            AttackSpec none;
            baseline = run_once(cfg, seed, none);
        }
        BpflRunResult run = run_once(cfg, seed, cfg.attack);

        SeedRun sr;
        sr.seed = seed;
        sr.final_accuracy = run.final_accuracy;
        if (baseline) sr.baseline_final_accuracy = baseline->final_accuracy;
        for (std::size_t i = 0; i < run.rounds.size(); ++i) {
            RoundMetrics m = run.rounds[i];
            if (baseline && i < baseline->rounds.size())
                m.attack_impact = baseline->rounds[i].accuracy - m.accuracy;
            if (metrics_out.is_open()) {
                metrics_out << metrics_to_json(m).dump() << '\n';
                metrics_out.flush();
            }
            sr.rounds.push_back(std::move(m));
        }
        summary.runs.push_back(std::move(sr));
    }

    if (!out_dir.empty()) {
        std::ofstream csv(fs::path(out_dir) / "summary.csv");
        csv << "seed,rule,attack,fraction,final_accuracy,baseline_final_accuracy,attack_impact,"
               "mean_accepted,median_prove_ms,median_verify_ms\n";
        for (const SeedRun& sr : summary.runs) {
            double mean_accepted = 0;
            std::vector<double> prove, verify;
            for (const RoundMetrics& m : sr.rounds) {
                mean_accepted += static_cast<double>(m.accepted);
                prove.push_back(m.prove_ms_median);
                verify.push_back(m.server_verify_ms);
            }
            if (!sr.rounds.empty()) mean_accepted /= static_cast<double>(sr.rounds.size());
            csv << sr.seed << ',' << rule_name(cfg.rule.variant) << ','
                << attack_variant_name(cfg.attack.variant) << ',' << cfg.attack.fraction << ','
                << sr.final_accuracy << ','
                << (sr.baseline_final_accuracy ? std::to_string(*sr.baseline_final_accuracy) : "")
                << ','
                << (sr.baseline_final_accuracy
                        ? std::to_string(*sr.baseline_final_accuracy - sr.final_accuracy)
                        : "")
                << ',' << mean_accepted << ',' << median_of(prove) << ',' << median_of(verify)
                << '\n';
        }
    }
    return summary;
}

} // namespace bpfl

#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "bpfl/protocol.hpp"

namespace bpfl {

struct SyntheticSpec {
    std::size_t classes = 2;
    std::size_t features = 31;
    std::size_t per_class = 200;   ///< training samples per class
    double separation = 5.0;       ///< distance of class means in sigma units
    std::size_t test_per_class = 100;
};

struct MnistSpec {
    std::string dir;            ///< directory with the four idx files
    std::size_t subset = 2000;  ///< training images used
    std::size_t test_subset = 1000;
};

struct DatasetConfig {
    enum class Source { Synthetic, MnistIdx } source = Source::Synthetic;
    SyntheticSpec synthetic;
    MnistSpec mnist;
    std::size_t server_samples = 200; ///< |D_S|, drawn from the training pool
};

enum class ComparisonMode { Model, Update };

struct ExperimentConfig {
    std::size_t n = 5;
    unsigned rounds = 10;
    std::vector<std::uint64_t> seeds = {1};
    AggregationRule rule{AggregationVariant::BpflMaskedSum, 0};
    AttackSpec attack;
    ModelSpec model{ModelFamily::Logistic, 31, 2, 16};
    unsigned local_epochs = 5;
    double learning_rate = 0.1;
    double tau_c = 0.99;
    double tau_e = 0.93;
    std::uint64_t scale = 1ULL << 16;
    double weight_bound = 8.0;
    FieldParams field_params = bn254_scalar_params();
    unsigned hash_rounds = 11;
    std::string hash_constants_seed = "bpfl/permutation/v1";
    unsigned paillier_bits = 512;
    bool renegotiate_mask = false;
    ComparisonMode comparison = ComparisonMode::Model;
    DatasetConfig dataset;
    std::string transport = "inproc"; ///< "inproc" or "tcp"
};

/// Client shards, server validation set D_S and the held-out test set.
struct DataPartitions {
    std::vector<Dataset> clients;
    Dataset server_validation;
    Dataset test;
};

/// IID Gaussian class blobs: D_S is a uniform draw from the training pool,
/// the remainder is split evenly across clients. Deterministic per seed.
DataPartitions generate_synthetic(const SyntheticSpec& spec, std::size_t n_clients,
                                  std::size_t server_samples, std::uint64_t seed);

/// MNIST (idx files) at subset scale; throws FormatError/ConfigError when
/// the files are missing or malformed.
DataPartitions load_mnist(const MnistSpec& spec, std::size_t n_clients,
                          std::size_t server_samples, std::uint64_t seed);

DataPartitions make_partitions(const ExperimentConfig& cfg, std::uint64_t seed);

/// --- configuration ---
/// Throws ConfigError naming the offending field path.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig config_from_file(const std::string& path);
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();
/// Fully-resolved config (all defaults materialized) for provenance output.
nlohmann::json resolved_json(const ExperimentConfig& cfg);
/// Apply BPFL_* environment overrides (dot path -> underscores, uppercase).
void apply_env_overrides(nlohmann::json& doc);

/// --- execution ---
struct RoundMetrics {
    std::uint64_t seed = 0;
    unsigned round = 0;
    std::size_t accepted = 0;
    std::vector<std::uint32_t> accepted_ids;
    std::vector<std::pair<std::uint32_t, std::string>> rejected;
    bool global_updated = true;
    double accuracy = 0;
    std::optional<double> attack_impact; ///< vs the attack-free shadow run
    double prove_ms_median = 0;
    double train_ms_median = 0;
    double server_train_ms = 0;
    double server_verify_ms = 0;
    double server_aggregate_ms = 0;
    std::uint64_t server_bytes_sent = 0;
    std::uint64_t server_bytes_received = 0;
    std::uint64_t client_bytes_sent = 0;
    std::uint64_t client_bytes_received = 0;
    std::uint64_t transcript_digest = 0;
};

struct SeedRun {
    std::uint64_t seed = 0;
    std::vector<RoundMetrics> rounds;
    double final_accuracy = 0;
    std::optional<double> baseline_final_accuracy;
};

struct ExperimentSummary {
    std::vector<SeedRun> runs;
};

/// Runs setup plus `rounds` rounds for every seed; when an attack is
/// configured, an attack-free shadow run with identical seeds supplies the
/// per-round attack-impact baseline. When `out_dir` is nonempty, writes
/// metrics.jsonl, summary.csv and resolved_config.json there.
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const std::string& out_dir = "");

} // namespace bpfl

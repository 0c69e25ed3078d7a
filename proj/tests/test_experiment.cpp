#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "bpfl/errors.hpp"
#include "bpfl/experiment.hpp"
#include "bpfl/idx.hpp"

using namespace bpfl;
using nlohmann::json;

namespace {
json tiny_doc() {
    return json{{"n", 3},
                {"rounds", 2},
                {"model", {{"features", 7}, {"classes", 2}}},
                {"dataset",
                 {{"features", 7}, {"classes", 2}, {"per_class", 45}, {"server_samples", 30},
                  {"test_per_class", 40}}},
                {"training", {{"local_epochs", 2}}},
                {"thresholds", {{"tau_c", 0.5}, {"tau_e", 6.0}}}};
}
} // namespace

TEST_CASE("config parsing: defaults, field paths, threat-model bound") {
    ExperimentConfig cfg = parse_config(tiny_doc());
    CHECK(cfg.n == 3);
    CHECK(cfg.rule.variant == AggregationVariant::BpflMaskedSum);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1});

    json bad = tiny_doc();
    bad["attack"] = {{"variant", "sign_flip"}, {"fraction", 0.6}};
    try {
        parse_config(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("attack.fraction") != std::string::npos);
        CHECK(msg.find("50%") != std::string::npos);
    }

    json unknown = tiny_doc();
    unknown["typo_key"] = 1;
    CHECK_THROWS_AS(parse_config(unknown), ConfigError);

    json mismatch = tiny_doc();
    mismatch["model"]["features"] = 9; // dataset says 7
    CHECK_THROWS_AS(parse_config(mismatch), ConfigError);

    json bad_mode = tiny_doc();
    bad_mode["comparison"] = "update"; // bpfl rule cannot use update mode
    CHECK_THROWS_AS(parse_config(bad_mode), ConfigError);
    bad_mode["aggregation"] = {{"rule", "krum"}, {"f", 1}};
    CHECK_NOTHROW(parse_config(bad_mode));
}

TEST_CASE("environment overrides rewrite known keys and reject unknown ones") {
    ::setenv("BPFL_ROUNDS", "7", 1);
    ::setenv("BPFL_THRESHOLDS_TAU_C", "0.25", 1);
    json doc = tiny_doc();
    apply_env_overrides(doc);
    ::unsetenv("BPFL_ROUNDS");
    ::unsetenv("BPFL_THRESHOLDS_TAU_C");
    ExperimentConfig cfg = parse_config(doc);
    CHECK(cfg.rounds == 7);
    CHECK(cfg.tau_c == 0.25);

    ::setenv("BPFL_NO_SUCH_KEY", "1", 1);
    json doc2 = tiny_doc();
    CHECK_THROWS_AS(apply_env_overrides(doc2), ConfigError);
    ::unsetenv("BPFL_NO_SUCH_KEY");
}

TEST_CASE("presets parse and carry the paper's parameter settings") {
    for (const std::string& name : preset_names()) {
        if (name == "mnist-smoke") continue; // requires dataset files to run, still parses
        CHECK_NOTHROW(preset(name));
    }
    ExperimentConfig paper = preset("paper-defaults");
    CHECK(paper.tau_c == 0.99);
    CHECK(paper.tau_e == 0.93);
    CHECK(paper.dataset.server_samples == 200);
    CHECK(paper.local_epochs == 5);
    CHECK(paper.rounds == 300);
    ExperimentConfig cifar = preset("paper-cifar-thresholds");
    CHECK(cifar.tau_e == 30.0);
    CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("synthetic partitions: shard shapes and determinism") {
    SyntheticSpec spec{2, 5, 100, 5.0, 60};
    DataPartitions parts = generate_synthetic(spec, 4, 37, 11);
    CHECK(parts.clients.size() == 4);
    for (const Dataset& d : parts.clients) CHECK(d.size() == 50);
    CHECK(parts.server_validation.size() == 37);
    CHECK(parts.test.size() == 120);

    DataPartitions again = generate_synthetic(spec, 4, 37, 11);
    CHECK(again.clients.front().features == parts.clients.front().features);
    CHECK(again.test.labels == parts.test.labels);
}

TEST_CASE("5-sigma blobs are separable: trained softmax reaches 0.95") {
    SyntheticSpec spec{2, 8, 150, 5.0, 100};
    DataPartitions parts = generate_synthetic(spec, 1, 40, 3);
    // separability oracle: the pairwise mean distance bounds the Bayes error
    double mean_dist = spec.separation * std::sqrt(2.0); // orthogonal class axes
    double bayes_bound = 0.5 * std::erfc(mean_dist / 2.0 / std::sqrt(2.0));
    CHECK(bayes_bound < 0.01);
    ModelSpec model{ModelFamily::Logistic, 8, 2, 0};
    ModelVector w = train_local(TrainingTask{parts.clients.front(), model, 5, 0.1},
                                zero_model(model), 5, 8.0);
    CHECK(evaluate(model, w, parts.test) >= 0.95);
}

TEST_CASE("idx: header shapes per the published format") {
    // image file: magic 00 00 08 03, rank 3
    IdxTensor images{{2, 3, 4}, std::vector<std::uint8_t>(24, 7)};
    std::vector<std::uint8_t> img_bytes = serialize_idx(images);
    CHECK(img_bytes[0] == 0x00);
    CHECK(img_bytes[1] == 0x00);
    CHECK(img_bytes[2] == 0x08);
    CHECK(img_bytes[3] == 0x03);
    IdxTensor img_back = parse_idx(img_bytes);
    CHECK(img_back.dims == images.dims);
    CHECK(img_back.data == images.data);

    // label file: magic 00 00 08 01, rank 1
    IdxTensor labels{{5}, {0, 1, 2, 3, 4}};
    std::vector<std::uint8_t> lab_bytes = serialize_idx(labels);
    CHECK(lab_bytes[3] == 0x01);
    CHECK(parse_idx(lab_bytes).dims == std::vector<std::uint32_t>{5});
}

TEST_CASE("idx: truncation names expected vs actual byte counts") {
    IdxTensor t{{3, 2}, {1, 2, 3, 4, 5, 6}};
    std::vector<std::uint8_t> bytes = serialize_idx(t);
    std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 2);
    try {
        parse_idx(truncated);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        std::string msg = e.what();
        CHECK(msg.find("expected 18") != std::string::npos);
        CHECK(msg.find("have 16") != std::string::npos);
    }
    std::vector<std::uint8_t> bad_magic = bytes;
    bad_magic[2] = 0x09;
    CHECK_THROWS_AS(parse_idx(bad_magic), FormatError);
}

TEST_CASE("idx round-trip property on random small tensors") {
    Rng rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        IdxTensor t;
        std::size_t rank = 1 + rng.below(3);
        std::size_t total = 1;
        for (std::size_t i = 0; i < rank; ++i) {
            t.dims.push_back(1 + static_cast<std::uint32_t>(rng.below(5)));
            total *= t.dims.back();
        }
        for (std::size_t i = 0; i < total; ++i)
            t.data.push_back(static_cast<std::uint8_t>(rng.below(256)));
        IdxTensor back = parse_idx(serialize_idx(t));
        CHECK(back.dims == t.dims);
        CHECK(back.data == t.data);
    }
}

TEST_CASE("run_experiment: files, accepted counts, provenance") {
    namespace fs = std::filesystem;
    ExperimentConfig cfg = parse_config(tiny_doc());
    fs::path out = fs::temp_directory_path() / "bpfl_test_out";
    fs::remove_all(out);
    ExperimentSummary summary = run_experiment(cfg, out.string());
    REQUIRE(summary.runs.size() == 1);
    CHECK(summary.runs.front().rounds.size() == 2);
    for (const RoundMetrics& m : summary.runs.front().rounds) {
        CHECK(m.accepted == 3);
        CHECK(m.client_bytes_sent > 0);
    }
    CHECK(fs::exists(out / "metrics.jsonl"));
    CHECK(fs::exists(out / "summary.csv"));
    CHECK(fs::exists(out / "resolved_config.json"));

    std::ifstream metrics((out / "metrics.jsonl").string());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(metrics, line)) {
        json record = json::parse(line);
        CHECK(record["accepted"] == 3);
        ++lines;
    }
    CHECK(lines == 2);

    json resolved = json::parse(std::ifstream((out / "resolved_config.json").string()));
    CHECK(resolved.contains("provenance"));
    CHECK(resolved["provenance"].contains("git"));
    CHECK(resolved["thresholds"]["tau_c"] == 0.5);
    fs::remove_all(out);
}

TEST_CASE("attack impact is reported against the attack-free shadow run") {
    json doc = tiny_doc();
    doc["attack"] = {{"variant", "sign_flip"}, {"fraction", 1.0 / 3.0}};
    ExperimentConfig cfg = parse_config(doc);
    ExperimentSummary summary = run_experiment(cfg);
    REQUIRE(summary.runs.size() == 1);
    const SeedRun& run = summary.runs.front();
    CHECK(run.baseline_final_accuracy.has_value());
    for (const RoundMetrics& m : run.rounds) {
        CHECK(m.attack_impact.has_value());
        CHECK(m.accepted == 2); // the flipped client is rejected
    }
}

TEST_CASE("baseline rules run the plaintext loop") {
    json doc = tiny_doc();
    doc["aggregation"] = {{"rule", "fedavg"}};
    ExperimentConfig cfg = parse_config(doc);
    ExperimentSummary summary = run_experiment(cfg);
    CHECK(summary.runs.front().final_accuracy > 0.8);

    doc["aggregation"] = {{"rule", "fltrust"}};
    doc["comparison"] = "update";
    ExperimentSummary fltrust = run_experiment(parse_config(doc));
    CHECK(fltrust.runs.front().final_accuracy > 0.8);
}

#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bpfl/errors.hpp"
#include "bpfl/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"BPFL experiment runner: Byzantine-robust federated learning with "
                 "zero-knowledge validity proofs over masked models"};
    app.require_subcommand(1);

    std::string config_path, preset_name, out_dir, transport;
    std::int64_t seed_override = -1;

    CLI::App* run = app.add_subcommand("run", "run an experiment");
    run->add_option("--config", config_path, "JSON experiment config");
    run->add_option("--preset", preset_name, "named preset (see `presets`)");
    run->add_option("--out", out_dir, "output directory for metrics/summary/config");
    run->add_option("--transport", transport, "inproc or tcp")
        ->check(CLI::IsMember({"inproc", "tcp"}));
    run->add_option("--seed", seed_override, "override the seed list with a single seed");

    CLI::App* presets = app.add_subcommand("presets", "list named presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets->parsed()) {
            for (const std::string& name : bpfl::preset_names()) std::cout << name << '\n';
            return 0;
        }

        bpfl::ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = bpfl::config_from_file(config_path);
        } else if (!preset_name.empty()) {
            cfg = bpfl::preset(preset_name);
        } else {
            std::cerr << "run: need --config or --preset\n";
            return 2;
        }
        if (!transport.empty()) cfg.transport = transport;
        if (seed_override >= 0) cfg.seeds = {static_cast<std::uint64_t>(seed_override)};

        bpfl::ExperimentSummary summary = bpfl::run_experiment(cfg, out_dir);
        for (const bpfl::SeedRun& sr : summary.runs) {
            std::cout << "seed " << sr.seed << ": final accuracy " << sr.final_accuracy;
            if (sr.baseline_final_accuracy)
                std::cout << " (attack impact "
                          << *sr.baseline_final_accuracy - sr.final_accuracy << ")";
            if (!sr.rounds.empty())
                std::cout << ", accepted " << sr.rounds.back().accepted << "/" << cfg.n
                          << " in the last round";
            std::cout << '\n';
        }
        if (!out_dir.empty()) std::cout << "metrics written to " << out_dir << '\n';
        return 0;
    } catch (const bpfl::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

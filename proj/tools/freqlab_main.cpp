#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "freqlab/experiment.hpp"

using namespace freqlab;

int main(int argc, char** argv) {
    CLI::App app{"freqlab: frequency-restricted estimates and nonlinear smoothing experiments"};
    app.require_subcommand(1);

    std::string config_path, out_root, suite_name;
    uint64_t seed = 0;
    bool has_seed = false, force = false;
    int threads = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "master seed")
            ->each([&](const std::string&) { has_seed = true; });
        cmd->add_option("--out", out_root, "output root directory (default $FREQLAB_OUT or ./runs)");
        cmd->add_option("--threads", threads, "worker threads for independent cells");
        cmd->add_flag("--force", force, "overwrite existing output directories");
    };

    CLI::App* run = app.add_subcommand("run", "run one experiment from a config file");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    add_common(run);

    CLI::App* suite = app.add_subcommand("suite", "run a named preset suite");
    suite->add_option("name", suite_name, "preset name (see 'list')")->required();
    add_common(suite);

    CLI::App* list = app.add_subcommand("list", "list equations, experiment kinds and presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            ExperimentConfig cfg = load_config_file(config_path);
            if (has_seed) {
                cfg.seed = seed;
                cfg.resolved["seed"] = seed;
            }
            cfg.threads = threads;
            const std::string dir = run_experiment(cfg, out_root, force);
            std::printf("wrote %s\n", dir.c_str());
            return 0;
        }
        if (suite->parsed()) {
            SuiteReport rep = run_suite(suite_name, has_seed ? seed : 1, threads, out_root, force);
            for (const auto& item : rep.items) {
                const std::string tag = item.id > 0 ? "C" + std::to_string(item.id) + " " : "";
                std::printf("%s %s%s: %s (%.1fs)\n", item.pass ? "PASS" : "FAIL", tag.c_str(),
                            item.name.c_str(), item.details.c_str(), item.seconds);
            }
            std::printf("%s\n", rep.all_passed ? "suite passed" : "suite FAILED");
            return rep.all_passed ? 0 : 1;
        }
        if (list->parsed()) {
            std::printf("equations:\n");
            for (const auto& id : equation_ids()) std::printf("  %s\n", id.c_str());
            std::printf("experiment kinds:\n");
            for (const char* k : {"sublevel", "beta_fit", "resonance_atlas", "morse_check",
                                  "tau_bound", "discrete_multilinear", "solve", "smoothing_scan"})
                std::printf("  %s\n", k);
            std::printf("presets:\n");
            for (const auto& p : preset_list()) std::printf("  %-18s %s\n", p.name.c_str(),
                                                            p.claim.c_str());
            return 0;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        // leave a diagnostics file next to the outputs when possible
        try {
            write_text_file("freqlab-diagnostics.txt", std::string("numerical abort: ") + e.what() +
                                                           "\n");
        } catch (...) {
        }
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

#ifndef FREQLAB_EXPERIMENT_HPP
#define FREQLAB_EXPERIMENT_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "freqlab/resonance.hpp"
#include "freqlab/smoothing.hpp"
#include "freqlab/sublevel.hpp"

namespace freqlab {

using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "freqlab 0.1.0";
inline constexpr const char* kOutputRootEnv = "FREQLAB_OUT";

// Parsed, validated experiment description.
struct ExperimentConfig {
    std::string kind;
    uint64_t seed = 1;
    int threads = 1;
    std::string out; // optional; empty -> derived from kind and seed
    json params;     // validated kind-specific block
    json resolved;   // full config echoed into the manifest
};

ExperimentConfig parse_config(const json& raw);
ExperimentConfig load_config_file(const std::string& path);

// Runs one experiment; creates outdir (refusing to overwrite without force),
// writes manifest.json plus kind-specific artifacts. Returns the directory.
std::string run_experiment(const ExperimentConfig& cfg, const std::string& out_root, bool force);

// Builds a SublevelSpec from its JSON description (see README for schema).
SublevelSpec spec_from_json(const json& j);
Equation equation_from_json(const json& j);
PhaseChart chart_from_json(const Equation& eq, const json& j);

// ---------------------------------------------------------------------------
// Suites and acceptance criteria.

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    bool gated = true; // counts toward the overall suite verdict
    std::string details;
    double seconds = 0.0;
};

// The acceptance checks, id in 1..11. Heavier settings are pinned in code.
CriterionResult run_criterion(int id, uint64_t seed, int threads, const std::string& scratch_dir);

struct PresetInfo {
    std::string name;
    std::string claim; // the property the preset exercises
};

std::vector<PresetInfo> preset_list();
bool preset_exists(const std::string& name);

struct SuiteReport {
    std::string name;
    std::vector<CriterionResult> items;
    bool all_passed = true;
};

SuiteReport run_suite(const std::string& name, uint64_t seed, int threads,
                      const std::string& out_root, bool force);

// CSV helpers shared by the writers (deterministic formatting)
std::string format_double(double v);
void write_text_file(const std::string& path, const std::string& content);

} // namespace freqlab

#endif

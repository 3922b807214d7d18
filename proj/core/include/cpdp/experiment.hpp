#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cpdp/dataset.hpp"
#include "cpdp/evaluation.hpp"
#include "cpdp/reprediction.hpp"
#include "cpdp/simulator.hpp"

namespace cpdp {

inline constexpr const char* kArtifactVersion = "cpdpsim 0.1.0";

// Parameters of the synthetic project pool used when no dataset
// directory is configured. Learning projects draw size, defect rate and
// signal strength from the given ranges so the arms differ in quality.
struct SyntheticSpec {
    std::size_t pool_projects = 33;  // including the target
    std::size_t target_modules = 235;
    double target_defect_rate = 0.115;
    std::size_t metrics = 6;
    double target_signal = 1.2;
    double signal_min = 0.4;
    double signal_max = 2.5;
    double defect_rate_min = 0.10;
    double defect_rate_max = 0.40;
    std::size_t learn_modules_min = 120;
    std::size_t learn_modules_max = 300;
};

struct ExperimentConfig {
    std::string dataset_dir;  // empty -> synthetic pool
    std::string id_column = "name";
    std::string label_column = "bug";
    std::string target;  // defaults: "arc" (files) / "target" (synthetic)
    SyntheticSpec synthetic;
    std::vector<std::size_t> sizes = {8, 16, 32};
    std::vector<PolicyKind> policies;      // default set in make_default_config
    std::vector<ApproachKind> approaches;  // default baseline/retest/multiple:2
    std::size_t repetitions = 40;
    double p_overlook = 0.2;
    std::uint64_t master_seed = 1;
    RewardAucMode reward_auc = RewardAucMode::Binary;
    bool retest_noise = true;
    bool resample_per_repetition = true;
    bool repredict_with_policy = false;
    bool write_traces = false;
    std::size_t threads = 1;
    std::string output_dir = "out";

    std::string resolved_target() const;
};

ExperimentConfig make_default_config();

// Key = value text config; '#' comments, unknown keys rejected, defaults
// applied for absent keys. Errors carry the offending line number.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

// Canonical echo of a config; the manifest embeds it and reparsing it
// reproduces the experiment.
void write_config(const ExperimentConfig& config, std::ostream& out);

struct CellKey {
    std::string policy_name;
    std::size_t n_projects = 0;
};

struct ExperimentResult {
    std::vector<RepetitionResult> repetitions;  // all cells, canonical order
    std::vector<ReportRow> rows;                // per-cell rows + average rows
    std::vector<BaselineSummary> baselines;
    std::vector<std::string> warnings;
    std::vector<std::string> aborted_cells;
};

// Loads (or synthesizes) the project pool for a config.
ProjectRegistry build_registry(const ExperimentConfig& config);

// Runs the full (policy x size x repetition) matrix and aggregates the
// report rows. Pure in-memory variant; write_outputs persists files.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes report_table1.csv / report_table2.csv / report_table1.txt /
// report_table2.txt / manifest.txt (and per-repetition traces when
// enabled) into config.output_dir.
void write_outputs(const ExperimentConfig& config, const ExperimentResult& result);

void write_manifest(const ExperimentConfig& config, const ProjectRegistry& registry,
                    const ExperimentResult& result, std::ostream& out);

// Replays a single repetition and emits its baseline + retest trace.
void emit_trace(const ExperimentConfig& config, const PolicyKind& policy, std::size_t size,
                std::size_t repetition, std::ostream& out);

// Spot-check harness: recomputes one repetition in isolation from the
// config and the derived seeds; its criteria match the full run's
// manifest entry exactly.
RepetitionResult replay_repetition(const ExperimentConfig& config, const PolicyKind& policy,
                                   std::size_t size, std::size_t repetition);

// Seed derivations shared by the runner, the trace replay, and the
// manifest. Documented: rep = derive(master, "cell/<policy>/<size>/rep<r>"),
// sub-streams derive from the repetition seed by name.
SeedRecord derive_repetition_seeds(std::uint64_t master_seed, const std::string& policy_name,
                                   std::size_t size, std::size_t repetition,
                                   bool resample_per_repetition);

}  // namespace cpdp

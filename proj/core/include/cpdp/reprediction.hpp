#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cpdp/simulator.hpp"

namespace cpdp {

struct RetestLogEntry {
    std::size_t pass_index = 1;  // 1-based
    std::string module_id;
    std::size_t module_index = 0;
    std::size_t reprediction_arm = 0;
    bool reprediction = false;
    bool retested = false;  // == reprediction for candidates
    std::optional<bool> retest_recorded_result;
    std::vector<double> arm_aucs_after;
};

struct ApproachKind {
    enum class Kind { Baseline, Retest, MultipleRetests };
    Kind kind = Kind::Baseline;
    std::size_t passes = 0;  // retest passes to run

    static ApproachKind baseline() { return {Kind::Baseline, 0}; }
    static ApproachKind retest() { return {Kind::Retest, 1}; }
    static ApproachKind multiple_retests(std::size_t passes = 2);

    std::string name() const;
    static ApproachKind parse(const std::string& text);
};

struct RetestOptions {
    bool apply_overlook_noise = true;  // fresh flip per retest when on
    // By default the re-prediction model is the greedy accuracy argmax;
    // optionally the run's bandit policy picks it instead.
    const PolicyKind* reselect_policy = nullptr;
};

// The arm with the highest current AUC; ties go to the lowest index.
std::size_t initial_reprediction_model(const std::vector<ArmState>& arms);

// One sweep over the modules in original test order. Modules whose
// current final prediction is defective are skipped untouched; for each
// remaining candidate the re-prediction model's cached prediction is
// recorded, and a defective re-prediction flips the final prediction,
// simulates a retest, feeds the result to every arm, and re-selects the
// re-prediction model. Flips are strictly non-defective -> defective.
std::vector<RetestLogEntry> run_retest_pass(SimulationRun& run, const OverlookModel& overlook,
                                            std::size_t pass_index, RandomStream& rng,
                                            const RetestOptions& options = {});

struct ApproachOutcome {
    SimulationRun run;
    std::vector<RetestLogEntry> retest_log;
};

// Applies an approach to a completed baseline run. The baseline is
// cloned, so one baseline trace serves all approaches of a repetition;
// each invocation must get an identically seeded retest stream for the
// passes to pair across approaches.
ApproachOutcome run_approach(const SimulationRun& baseline, const ApproachKind& approach,
                             const OverlookModel& overlook, RandomStream retest_rng,
                             const RetestOptions& options = {});

// Trace export mirroring the retest procedure's columns.
void write_retest_trace(const SimulationRun& run, const std::vector<RetestLogEntry>& entries,
                        std::ostream& out);

}  // namespace cpdp

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cpdp/bandit.hpp"
#include "cpdp/dataset.hpp"
#include "cpdp/learner.hpp"
#include "cpdp/random.hpp"

namespace cpdp {

// Probability that the test of a truly defective module records
// "non-defective" anyway. Clean modules are never flipped.
struct OverlookModel {
    double p_overlook = 0.2;
};

enum class Effort { High, Low };

// alpha: predicted defective, actually clean (wasted thorough test).
// beta:  predicted non-defective, actually defective (likely overlooked).
// gamma: predicted defective and defective, but the test missed it.
enum class OutcomeCase { Alpha, Beta, Gamma, None };

struct TestLogEntry {
    std::string module_id;
    std::size_t module_index = 0;
    std::size_t order = 0;  // 1-based test position
    std::vector<bool> per_arm_prediction;
    std::size_t selected_arm = 0;
    bool used_prediction = false;
    bool recorded_result = false;
    bool true_label = false;
    Effort effort = Effort::Low;
    OutcomeCase outcome_case = OutcomeCase::None;
    std::vector<double> per_arm_auc_after;
};

// One arm-evaluation event: every test and retest lands here, in the
// order the arms saw it. Replaying events against the prediction cache
// reproduces every arm's confusion counts.
struct TestEvent {
    std::size_t module_index = 0;
    bool recorded = false;
};

struct SeedRecord {
    std::uint64_t repetition = 0;
    std::uint64_t sampling = 0;
    std::uint64_t order = 0;
    std::uint64_t policy = 0;
    std::uint64_t noise = 0;
    std::uint64_t retest_noise = 0;
};

// Complete trace of one testing pass over the target. Value type: retest
// passes work on copies, so the three approaches of one repetition share
// the identical baseline.
struct SimulationRun {
    std::vector<std::string> arm_names;
    std::vector<std::string> module_ids;
    std::vector<bool> true_labels;
    std::vector<std::size_t> order;                   // order[i] = module tested at step i+1
    std::vector<std::vector<bool>> predictions;       // [arm][module], cached once
    std::vector<std::vector<double>> probabilities;   // [arm][module]
    std::vector<TestLogEntry> log;
    std::vector<bool> final_prediction;               // by module index
    std::vector<ArmState> arms;
    std::vector<TestEvent> events;
    RewardAucMode reward_mode = RewardAucMode::Binary;
    SeedRecord seeds;

    std::map<std::string, bool> final_prediction_by_id() const;
    std::vector<bool> arm_prediction_column(std::size_t module_index) const;

    // Recomputes every arm's AUC from the event history; used after
    // events are appended in probability reward mode.
    void refresh_probability_aucs();
};

// Simulates one recorded test result. Draws exactly one variate when the
// module is truly defective and none otherwise.
bool record_test(bool true_label, const OverlookModel& overlook, RandomStream& rng);

// Uniform random permutation of {0,...,n-1} by Fisher-Yates.
std::vector<std::size_t> make_order(std::size_t n, RandomStream& rng);

// Runs the sequential baseline pass: predictions cached per arm, one arm
// selected per module by the policy, recorded result simulated under the
// overlook model, and every arm evaluated on every module.
SimulationRun run_baseline(const std::vector<DefectModel>& models, const ProjectDataset& target,
                           const std::vector<std::size_t>& order, const PolicyKind& policy,
                           const OverlookModel& overlook, RandomStream& policy_rng,
                           RandomStream& noise_rng,
                           RewardAucMode reward_mode = RewardAucMode::Binary);

// Trace export, one row per log entry with per-arm prediction and AUC
// columns.
void write_baseline_trace(const SimulationRun& run, std::ostream& out);

}  // namespace cpdp

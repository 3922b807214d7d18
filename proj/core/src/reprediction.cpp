#include "cpdp/reprediction.hpp"

#include <cstdio>
#include <cstdlib>
#include <ostream>

#include "cpdp/error.hpp"

namespace cpdp {

ApproachKind ApproachKind::multiple_retests(std::size_t passes) {
    if (passes < 1) throw ConfigError("multiple retests needs at least 1 pass");
    return {Kind::MultipleRetests, passes};
}

std::string ApproachKind::name() const {
    switch (kind) {
        case Kind::Baseline: return "baseline";
        case Kind::Retest: return "retest";
        default: return "multiple:" + std::to_string(passes);
    }
}

ApproachKind ApproachKind::parse(const std::string& text) {
    if (text == "baseline") return baseline();
    if (text == "retest") return retest();
    if (text == "multiple") return multiple_retests();
    if (text.rfind("multiple:", 0) == 0) {
        const std::string arg = text.substr(9);
        char* end = nullptr;
        const long v = std::strtol(arg.c_str(), &end, 10);
        if (arg.empty() || end != arg.c_str() + arg.size() || v < 1)
            throw ConfigError("bad pass count in approach '" + text + "'");
        return multiple_retests(static_cast<std::size_t>(v));
    }
    throw ConfigError("unknown approach '" + text +
                      "' (expected baseline, retest, or multiple[:<passes>])");
}

std::size_t initial_reprediction_model(const std::vector<ArmState>& arms) {
    if (arms.empty()) throw Error("initial_reprediction_model: no arms");
    std::size_t best = 0;
    for (std::size_t i = 1; i < arms.size(); ++i)
        if (arms[i].auc > arms[best].auc) best = i;
    return best;
}

std::vector<RetestLogEntry> run_retest_pass(SimulationRun& run, const OverlookModel& overlook,
                                            std::size_t pass_index, RandomStream& rng,
                                            const RetestOptions& options) {
    if (run.log.empty()) throw Error("run_retest_pass: baseline run is empty");

    std::size_t current = initial_reprediction_model(run.arms);
    std::vector<RetestLogEntry> entries;

    for (const TestLogEntry& base : run.log) {  // original test order
        const std::size_t mi = base.module_index;
        if (run.final_prediction[mi]) continue;  // defective predictions stay untouched

        RetestLogEntry e;
        e.pass_index = pass_index;
        e.module_id = run.module_ids[mi];
        e.module_index = mi;
        e.reprediction_arm = current;
        e.reprediction = run.predictions[current][mi];
        e.retested = e.reprediction;

        if (e.reprediction) {
            run.final_prediction[mi] = true;  // flip is one-way by construction
            const bool label = run.true_labels[mi];
            const bool recorded =
                options.apply_overlook_noise ? record_test(label, overlook, rng) : label;
            e.retest_recorded_result = recorded;

            update_arms(run.arms, run.arm_prediction_column(mi), recorded);
            run.events.push_back({mi, recorded});
            if (run.reward_mode == RewardAucMode::Probability) run.refresh_probability_aucs();

            if (options.reselect_policy) {
                current = select_arm(*options.reselect_policy, run.arms, run.events.size() + 1,
                                     rng);
            } else {
                current = initial_reprediction_model(run.arms);
            }
        }

        e.arm_aucs_after.reserve(run.arms.size());
        for (const auto& a : run.arms) e.arm_aucs_after.push_back(a.auc);
        entries.push_back(std::move(e));
    }
    return entries;
}

ApproachOutcome run_approach(const SimulationRun& baseline, const ApproachKind& approach,
                             const OverlookModel& overlook, RandomStream retest_rng,
                             const RetestOptions& options) {
    ApproachOutcome out;
    out.run = baseline;
    if (approach.kind == ApproachKind::Kind::Baseline) return out;

    const std::size_t passes = approach.kind == ApproachKind::Kind::Retest ? 1 : approach.passes;
    for (std::size_t p = 1; p <= passes; ++p) {
        auto entries = run_retest_pass(out.run, overlook, p, retest_rng, options);
        out.retest_log.insert(out.retest_log.end(), entries.begin(), entries.end());
    }
    return out;
}

void write_retest_trace(const SimulationRun& run, const std::vector<RetestLogEntry>& entries,
                        std::ostream& out) {
    out << "pass,module,reprediction_model,reprediction,retested,retest_result";
    for (const auto& name : run.arm_names) out << ",auc_" << name;
    out << '\n';
    for (const auto& e : entries) {
        out << e.pass_index << ',' << e.module_id << ',' << run.arm_names[e.reprediction_arm]
            << ',' << (e.reprediction ? "DE" : "ND") << ',' << (e.retested ? "yes" : "no") << ',';
        if (e.retest_recorded_result)
            out << (*e.retest_recorded_result ? "DE" : "ND");
        else
            out << '-';
        char buf[32];
        for (double a : e.arm_aucs_after) {
            std::snprintf(buf, sizeof(buf), "%.6f", a);
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace cpdp

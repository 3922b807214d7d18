#include "cpdp/simulator.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "cpdp/error.hpp"

namespace cpdp {

std::map<std::string, bool> SimulationRun::final_prediction_by_id() const {
    std::map<std::string, bool> out;
    for (std::size_t i = 0; i < module_ids.size(); ++i)
        out.emplace(module_ids[i], static_cast<bool>(final_prediction[i]));
    return out;
}

std::vector<bool> SimulationRun::arm_prediction_column(std::size_t module_index) const {
    std::vector<bool> col(predictions.size());
    for (std::size_t a = 0; a < predictions.size(); ++a) col[a] = predictions[a][module_index];
    return col;
}

void SimulationRun::refresh_probability_aucs() {
    std::vector<bool> outcomes;
    outcomes.reserve(events.size());
    for (const auto& e : events) outcomes.push_back(e.recorded);
    std::vector<double> scores(events.size());
    for (std::size_t a = 0; a < arms.size(); ++a) {
        for (std::size_t k = 0; k < events.size(); ++k)
            scores[k] = probabilities[a][events[k].module_index];
        arms[a].auc = score_auc(scores, outcomes);
    }
}

bool record_test(bool true_label, const OverlookModel& overlook, RandomStream& rng) {
    if (!true_label) return false;
    return !(rng.uniform() < overlook.p_overlook);
}

std::vector<std::size_t> make_order(std::size_t n, RandomStream& rng) {
    if (n == 0) throw Error("make_order: n must be positive");
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

namespace {

OutcomeCase classify_outcome(bool used_prediction, bool true_label, bool recorded_result) {
    if (used_prediction && !true_label) return OutcomeCase::Alpha;
    if (!used_prediction && true_label) return OutcomeCase::Beta;
    if (used_prediction && true_label && !recorded_result) return OutcomeCase::Gamma;
    return OutcomeCase::None;
}

void check_permutation(const std::vector<std::size_t>& order, std::size_t n) {
    if (order.size() != n) throw Error("order is not a permutation of the target modules");
    std::vector<bool> seen(n, false);
    for (std::size_t v : order) {
        if (v >= n || seen[v]) throw Error("order is not a permutation of the target modules");
        seen[v] = true;
    }
}

}  // namespace

SimulationRun run_baseline(const std::vector<DefectModel>& models, const ProjectDataset& target,
                           const std::vector<std::size_t>& order, const PolicyKind& policy,
                           const OverlookModel& overlook, RandomStream& policy_rng,
                           RandomStream& noise_rng, RewardAucMode reward_mode) {
    if (models.size() < 2) throw Error("run_baseline: need at least 2 models");
    const std::size_t n = target.modules.size();
    check_permutation(order, n);

    SimulationRun run;
    run.reward_mode = reward_mode;
    run.order = order;
    run.arm_names.reserve(models.size());
    for (const auto& m : models) run.arm_names.push_back(m.source_project);
    run.module_ids.reserve(n);
    run.true_labels.reserve(n);
    for (const auto& m : target.modules) {
        run.module_ids.push_back(m.id);
        run.true_labels.push_back(m.label);
    }

    // Model predictions are order-independent; compute them once.
    run.probabilities.assign(models.size(), std::vector<double>(n, 0.0));
    run.predictions.assign(models.size(), std::vector<bool>(n, false));
    for (std::size_t a = 0; a < models.size(); ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = predict_prob(models[a], target.modules[i]);
            run.probabilities[a][i] = p;
            run.predictions[a][i] = p >= models[a].threshold;
        }
    }

    run.arms.resize(models.size());
    for (std::size_t a = 0; a < models.size(); ++a) run.arms[a].model_index = a;
    run.final_prediction.assign(n, false);
    run.log.reserve(n);
    run.events.reserve(n);

    for (std::size_t t = 1; t <= n; ++t) {
        const std::size_t mi = order[t - 1];
        const std::size_t sel = select_arm(policy, run.arms, t, policy_rng);
        const bool used = run.predictions[sel][mi];
        const bool label = run.true_labels[mi];
        const bool recorded = record_test(label, overlook, noise_rng);

        const auto col = run.arm_prediction_column(mi);
        update_arms(run.arms, col, recorded);
        run.events.push_back({mi, recorded});
        if (reward_mode == RewardAucMode::Probability) run.refresh_probability_aucs();

        TestLogEntry e;
        e.module_id = run.module_ids[mi];
        e.module_index = mi;
        e.order = t;
        e.per_arm_prediction = col;
        e.selected_arm = sel;
        e.used_prediction = used;
        e.recorded_result = recorded;
        e.true_label = label;
        e.effort = used ? Effort::High : Effort::Low;
        e.outcome_case = classify_outcome(used, label, recorded);
        e.per_arm_auc_after.reserve(run.arms.size());
        for (const auto& a : run.arms) e.per_arm_auc_after.push_back(a.auc);
        run.log.push_back(std::move(e));

        run.final_prediction[mi] = used;
    }
    return run;
}

namespace {

const char* effort_name(Effort e) { return e == Effort::High ? "High" : "Low"; }

const char* case_name(OutcomeCase c) {
    switch (c) {
        case OutcomeCase::Alpha: return "alpha";
        case OutcomeCase::Beta: return "beta";
        case OutcomeCase::Gamma: return "gamma";
        default: return "none";
    }
}

}  // namespace

void write_baseline_trace(const SimulationRun& run, std::ostream& out) {
    out << "module,order";
    for (const auto& name : run.arm_names) out << ",pred_" << name;
    out << ",selected_model,selected_prediction,test_result,true_label,effort,case";
    for (const auto& name : run.arm_names) out << ",auc_" << name;
    out << '\n';
    for (const auto& e : run.log) {
        out << e.module_id << ',' << e.order;
        for (bool p : e.per_arm_prediction) out << ',' << (p ? "DE" : "ND");
        out << ',' << run.arm_names[e.selected_arm] << ',' << (e.used_prediction ? "DE" : "ND")
            << ',' << (e.recorded_result ? "DE" : "ND") << ',' << (e.true_label ? "DE" : "ND")
            << ',' << effort_name(e.effort) << ',' << case_name(e.outcome_case);
        char buf[32];
        for (double a : e.per_arm_auc_after) {
            std::snprintf(buf, sizeof(buf), "%.6f", a);
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace cpdp

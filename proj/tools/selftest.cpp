#include "selftest.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "cpdp/bandit.hpp"
#include "cpdp/evaluation.hpp"
#include "cpdp/experiment.hpp"
#include "cpdp/random.hpp"

namespace {

int failures = 0;

void check(bool ok, const char* what) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what);
    if (!ok) ++failures;
}

// Pairwise-comparison AUC over binary scores; the independent cross-check
// for the closed form.
double pairwise_auc(long long tp, long long fp, long long tn, long long fn) {
    const double pos = static_cast<double>(tp + fn);
    const double neg = static_cast<double>(tn + fp);
    if (pos == 0 || neg == 0) return 0.5;
    const double concordant = static_cast<double>(tp) * static_cast<double>(tn);
    const double ties = static_cast<double>(tp) * static_cast<double>(fp) +
                        static_cast<double>(fn) * static_cast<double>(tn);
    return (concordant + 0.5 * ties) / (pos * neg);
}

void auc_identity() {
    cpdp::RandomStream rng(7001);
    bool ok = std::abs(cpdp::arm_auc(8, 4, 6, 2) - 0.7) < 1e-12;
    for (int i = 0; i < 200 && ok; ++i) {
        const long long tp = static_cast<long long>(rng.below(40));
        const long long fp = static_cast<long long>(rng.below(40));
        const long long tn = static_cast<long long>(rng.below(40));
        const long long fn = static_cast<long long>(rng.below(40));
        ok = std::abs(cpdp::arm_auc(tp, fp, tn, fn) - pairwise_auc(tp, fp, tn, fn)) < 1e-12;
    }
    check(ok, "arm_auc equals the pairwise-comparison AUC");
}

void greedy_argmax() {
    cpdp::RandomStream rng(7002);
    const auto greedy = cpdp::PolicyKind::epsilon_greedy(0.0);
    bool ok = true;
    for (int i = 0; i < 2000 && ok; ++i) {
        std::vector<cpdp::ArmState> arms(2 + rng.below(6));
        std::size_t best = 0;
        for (std::size_t a = 0; a < arms.size(); ++a) {
            arms[a].model_index = a;
            arms[a].auc = static_cast<double>(rng.below(1000)) / 1000.0 +
                          static_cast<double>(a) * 1e-9;  // distinct
            if (arms[a].auc > arms[best].auc) best = a;
        }
        ok = cpdp::select_arm(greedy, arms, 2, rng) == best;
    }
    check(ok, "epsilon=0 selection equals argmax");
}

void explore_uniformity() {
    cpdp::RandomStream rng(7003);
    const auto explore = cpdp::PolicyKind::epsilon_greedy(1.0);
    const std::size_t k = 5;
    const int n = 20000;
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
        std::vector<cpdp::ArmState> arms(k);
        for (std::size_t a = 0; a < k; ++a) arms[a].auc = 0.1 * static_cast<double>(a);
        ++counts[cpdp::select_arm(explore, arms, 2, rng)];
    }
    const double expect = static_cast<double>(n) / k;
    const double sigma = std::sqrt(n * (1.0 / k) * (1.0 - 1.0 / k));
    bool ok = true;
    for (int c : counts) ok = ok && std::abs(c - expect) <= 3.0 * sigma;
    check(ok, "epsilon=1 selection frequencies uniform within 3 sigma");
}

void wilcoxon_hand_case() {
    std::vector<std::pair<double, double>> pairs;
    for (int i = 1; i <= 6; ++i) pairs.emplace_back(0.0, static_cast<double>(i));
    const double p = cpdp::wilcoxon_signed_rank(pairs);
    check(std::abs(p - 0.03125) < 1e-12, "wilcoxon exact tail: n=6 all-positive gives 0.03125");
}

void determinism_smoke() {
    cpdp::ExperimentConfig cfg = cpdp::make_default_config();
    cfg.sizes = {4};
    cfg.policies = {cpdp::PolicyKind::epsilon_greedy(0.1)};
    cfg.repetitions = 3;
    cfg.synthetic.pool_projects = 6;
    cfg.synthetic.target_modules = 60;
    cfg.synthetic.learn_modules_min = 40;
    cfg.synthetic.learn_modules_max = 60;
    cfg.master_seed = 99;

    std::ostringstream a, b;
    const cpdp::ProjectRegistry reg = cpdp::build_registry(cfg);
    auto result1 = cpdp::run_experiment(cfg);
    auto result2 = cpdp::run_experiment(cfg);
    cpdp::write_manifest(cfg, reg, result1, a);
    cpdp::write_manifest(cfg, reg, result2, b);
    check(a.str() == b.str(), "repeated run with one seed is byte-identical");
}

void flip_monotonicity() {
    cpdp::ExperimentConfig cfg = cpdp::make_default_config();
    cfg.sizes = {3};
    cfg.policies = {cpdp::PolicyKind::epsilon_greedy(0.2), cpdp::PolicyKind::ucb()};
    cfg.repetitions = 10;
    cfg.synthetic.pool_projects = 5;
    cfg.synthetic.target_modules = 50;
    cfg.synthetic.learn_modules_min = 40;
    cfg.synthetic.learn_modules_max = 80;
    cfg.master_seed = 1234;
    const auto result = cpdp::run_experiment(cfg);
    bool ok = !result.repetitions.empty();
    for (const auto& r : result.repetitions) {
        ok = ok && r.baseline && r.retest && r.multiple;
        if (!ok) break;
        ok = r.baseline->found_defects <= r.retest->found_defects &&
             r.retest->found_defects <= r.multiple->found_defects;
    }
    check(ok, "found defects never decrease from baseline to retest to multiple retests");
}

}  // namespace

int run_selftest() {
    failures = 0;
    auc_identity();
    greedy_argmax();
    explore_uniformity();
    wilcoxon_hand_case();
    determinism_smoke();
    flip_monotonicity();
    std::printf("%s\n", failures == 0 ? "selftest: all checks passed"
                                      : "selftest: FAILURES detected");
    return failures;
}

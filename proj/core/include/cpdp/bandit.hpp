#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cpdp/random.hpp"

namespace cpdp {

// Reward definition for the accuracy feedback: the default scores each
// arm's binary predictions against recorded results (equivalent to
// balanced accuracy); the alternative ranks the arm's predicted
// probabilities instead.
enum class RewardAucMode { Binary, Probability };

// Running evaluation of one prediction model against recorded test
// results. Every arm sees every tested module, so tp+fp+tn+fn equals the
// number of test events regardless of which arm was selected.
struct ArmState {
    std::size_t model_index = 0;
    long long n_selected = 0;
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    double auc = 0.5;
};

struct PolicyKind {
    enum class Kind { EpsilonGreedy, Ucb };
    Kind kind = Kind::EpsilonGreedy;
    double epsilon = 0.0;         // EpsilonGreedy only
    double ucb_c = 1.4142135623730951;  // Ucb only, sqrt(2) by default

    static PolicyKind epsilon_greedy(double epsilon);
    static PolicyKind ucb(double c = 1.4142135623730951);

    // Canonical name used in reports, seeds, and config files:
    // "epsilon:0.1" or "ucb" / "ucb:2".
    std::string name() const;
    static PolicyKind parse(const std::string& text);
};

// AUC of binary predictions versus recorded results: (TPR + TNR) / 2.
// Returns 0.5 when either class has not been observed.
double arm_auc(long long tp, long long fp, long long tn, long long fn);

// Pairwise-ranking AUC of real-valued scores, ties counted half.
// Used for the probability reward mode.
double score_auc(const std::vector<double>& scores, const std::vector<bool>& outcomes);

// Feeds one recorded result to every arm: exactly one of tp/fp/tn/fn is
// incremented per arm and its AUC recomputed.
void update_arms(std::vector<ArmState>& arms, const std::vector<bool>& per_arm_predictions,
                 bool recorded_result);

// Returns arm.auc plus the exploration bonus c*sqrt(ln t / n_selected);
// untried arms score above any finite value.
double ucb_score(const ArmState& arm, std::size_t t, double c);

// Picks the active model for step t (1-based: modules tested so far + 1)
// and increments its selection count. Step 1 is a uniform random pick.
// Argmax ties are broken uniformly at random from the tied set; UCB picks
// the lowest-index untried arm before any retried one.
std::size_t select_arm(const PolicyKind& policy, std::vector<ArmState>& arms, std::size_t t,
                       RandomStream& rng);

}  // namespace cpdp

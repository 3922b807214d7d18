#include "cpdp/bandit.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "cpdp/error.hpp"

namespace cpdp {

PolicyKind PolicyKind::epsilon_greedy(double epsilon) {
    if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("epsilon must lie in [0,1]");
    PolicyKind p;
    p.kind = Kind::EpsilonGreedy;
    p.epsilon = epsilon;
    return p;
}

PolicyKind PolicyKind::ucb(double c) {
    if (c <= 0.0) throw ConfigError("UCB exploration constant must be positive");
    PolicyKind p;
    p.kind = Kind::Ucb;
    p.ucb_c = c;
    return p;
}

std::string PolicyKind::name() const {
    char buf[40];
    if (kind == Kind::EpsilonGreedy) {
        std::snprintf(buf, sizeof(buf), "epsilon:%g", epsilon);
    } else if (ucb_c == 1.4142135623730951) {
        return "ucb";
    } else {
        std::snprintf(buf, sizeof(buf), "ucb:%g", ucb_c);
    }
    return buf;
}

PolicyKind PolicyKind::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto numeric = [&](const std::string& s) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size())
            throw ConfigError("bad policy parameter '" + s + "' in '" + text + "'");
        return v;
    };
    if (head == "epsilon") {
        if (arg.empty()) throw ConfigError("policy 'epsilon' needs a value, e.g. epsilon:0.1");
        return epsilon_greedy(numeric(arg));
    }
    if (head == "ucb") return arg.empty() ? ucb() : ucb(numeric(arg));
    throw ConfigError("unknown policy '" + text + "' (expected epsilon:<v> or ucb[:<c>])");
}

double arm_auc(long long tp, long long fp, long long tn, long long fn) {
    const long long pos = tp + fn;
    const long long neg = tn + fp;
    if (pos == 0 || neg == 0) return 0.5;
    const double tpr = static_cast<double>(tp) / static_cast<double>(pos);
    const double tnr = static_cast<double>(tn) / static_cast<double>(neg);
    return 0.5 * (tpr + tnr);
}

double score_auc(const std::vector<double>& scores, const std::vector<bool>& outcomes) {
    if (scores.size() != outcomes.size()) throw Error("score_auc: length mismatch");
    // Rank-based Mann-Whitney with average ranks for ties.
    const std::size_t n = scores.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double pos_rank_sum = 0.0;
    std::size_t npos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t k = i; k < j; ++k) {
            if (outcomes[idx[k]]) {
                pos_rank_sum += avg_rank;
                ++npos;
            }
        }
        i = j;
    }
    const std::size_t nneg = n - npos;
    if (npos == 0 || nneg == 0) return 0.5;
    const double u = pos_rank_sum - static_cast<double>(npos) * (npos + 1) / 2.0;
    return u / (static_cast<double>(npos) * static_cast<double>(nneg));
}

void update_arms(std::vector<ArmState>& arms, const std::vector<bool>& per_arm_predictions,
                 bool recorded_result) {
    if (arms.size() != per_arm_predictions.size())
        throw Error("update_arms: prediction count does not match arm count");
    for (std::size_t i = 0; i < arms.size(); ++i) {
        ArmState& a = arms[i];
        const bool pred = per_arm_predictions[i];
        if (pred && recorded_result) ++a.tp;
        else if (pred && !recorded_result) ++a.fp;
        else if (!pred && recorded_result) ++a.fn;
        else ++a.tn;
        a.auc = arm_auc(a.tp, a.fp, a.tn, a.fn);
    }
}

double ucb_score(const ArmState& arm, std::size_t t, double c) {
    if (arm.n_selected == 0) return std::numeric_limits<double>::infinity();
    return arm.auc + c * std::sqrt(std::log(static_cast<double>(t)) /
                                   static_cast<double>(arm.n_selected));
}

namespace {

// Uniform pick from the argmax set; no draw is consumed when the argmax
// is unique.
std::size_t argmax_random_tie(const std::vector<double>& values, RandomStream& rng) {
    double best = values[0];
    for (double v : values) best = std::max(best, v);
    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] == best) tied.push_back(i);
    if (tied.size() == 1) return tied[0];
    return tied[static_cast<std::size_t>(rng.below(tied.size()))];
}

}  // namespace

std::size_t select_arm(const PolicyKind& policy, std::vector<ArmState>& arms, std::size_t t,
                       RandomStream& rng) {
    if (arms.size() < 2) throw Error("select_arm: need at least 2 arms");
    std::size_t chosen;
    if (t == 1) {
        chosen = static_cast<std::size_t>(rng.below(arms.size()));
    } else if (policy.kind == PolicyKind::Kind::EpsilonGreedy) {
        if (policy.epsilon > 0.0 && rng.uniform() < policy.epsilon) {
            chosen = static_cast<std::size_t>(rng.below(arms.size()));
        } else {
            std::vector<double> aucs(arms.size());
            for (std::size_t i = 0; i < arms.size(); ++i) aucs[i] = arms[i].auc;
            chosen = argmax_random_tie(aucs, rng);
        }
    } else {
        std::size_t untried = arms.size();
        for (std::size_t i = 0; i < arms.size(); ++i) {
            if (arms[i].n_selected == 0) {
                untried = i;
                break;
            }
        }
        if (untried < arms.size()) {
            chosen = untried;
        } else {
            std::vector<double> scores(arms.size());
            for (std::size_t i = 0; i < arms.size(); ++i)
                scores[i] = ucb_score(arms[i], t, policy.ucb_c);
            chosen = argmax_random_tie(scores, rng);
        }
    }
    ++arms[chosen].n_selected;
    return chosen;
}

}  // namespace cpdp

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpdp/bandit.hpp"
#include "cpdp/reprediction.hpp"
#include "cpdp/simulator.hpp"

namespace cpdp {

// Per-approach, per-repetition evaluation against ground-truth labels.
struct CriterionSet {
    double auc = 0.5;
    long long found_defects = 0;  // true positives of the final predictions
    long long retests = 0;
};

struct RepetitionResult {
    std::size_t repetition_index = 0;
    std::string policy_name;
    std::size_t n_projects = 0;
    std::optional<CriterionSet> baseline;
    std::optional<CriterionSet> retest;
    std::optional<CriterionSet> multiple;
    SeedRecord seeds;
    std::vector<std::string> learning_projects;
};

// One comparison row (one criterion of one policy/size cell). DIFF and
// RDIFF compare approach pairs (B,R), (B,MR), (R,MR); absent approaches
// or zero denominators leave the optional empty and the report prints an
// explicit marker.
struct ReportRow {
    std::string policy_name;
    std::size_t n_projects = 0;
    std::string criterion;  // "auc" or "found_defects"
    std::optional<double> mean_baseline, mean_retest, mean_multiple;
    std::optional<double> diff_b_r, diff_b_mr, diff_r_mr;
    std::optional<double> rdiff_b_r, rdiff_b_mr, rdiff_r_mr;          // from means
    std::optional<double> rdiff_rep_b_r, rdiff_rep_b_mr, rdiff_rep_r_mr;  // mean of per-rep rdiffs
    std::optional<double> p_b_r, p_b_mr, p_r_mr;
};

// Baseline-only summary (mean AUC / found defects), plus mean retest
// counts of the other approaches for the effort summary.
struct BaselineSummary {
    std::string policy_name;
    std::size_t n_projects = 0;
    std::size_t repetitions = 0;
    double mean_auc = 0.0;
    double mean_found_defects = 0.0;
    std::optional<double> mean_retests_retest;
    std::optional<double> mean_retests_multiple;
};

// Binary-prediction AUC of the final predictions against ground truth:
// (TPR + TNR) / 2, or 0.5 when either class is absent.
double final_auc(const std::vector<bool>& final_prediction, const std::vector<bool>& true_labels);

long long count_found_defects(const std::vector<bool>& final_prediction,
                              const std::vector<bool>& true_labels);

CriterionSet evaluate_outcome(const ApproachOutcome& outcome);

// DIFF(a, b) = b - a; positive means the second approach improves.
double diff(double a, double b);

// RDIFF(a, b) = b / a - 1. A zero denominator is an error; report rows
// carry the undefined marker instead.
double rdiff(double a, double b);

// Two-sided Wilcoxon signed-rank p-value of paired samples. Zero
// differences are dropped; tied absolute differences get average ranks.
// Up to 25 non-zero pairs the exact sign-assignment distribution is
// used, beyond that a tie-corrected normal approximation with continuity
// correction. All differences zero yields 1.0.
double wilcoxon_signed_rank(const std::vector<std::pair<double, double>>& pairs);

// The two modes individually, for cross-checking one against the other.
double wilcoxon_signed_rank_exact(const std::vector<std::pair<double, double>>& pairs);
double wilcoxon_signed_rank_approx(const std::vector<std::pair<double, double>>& pairs);

// Aggregates the repetitions of ONE (policy, size) cell into the two
// criterion rows. Pairedness of found-defect diffs is asserted: retests
// can only add true positives, so DIFF(B,R) and DIFF(R,MR) must be
// non-negative in every repetition.
std::vector<ReportRow> aggregate(const std::vector<RepetitionResult>& results);

BaselineSummary baseline_summary(const std::vector<RepetitionResult>& results);

// "Average" row across the policy rows of one size: column means, with
// p-values from the pooled per-repetition pairs of all policies.
ReportRow average_row(const std::vector<ReportRow>& rows,
                      const std::vector<RepetitionResult>& pooled_results,
                      const std::string& criterion);

void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out);
void write_baseline_csv(const std::vector<BaselineSummary>& summaries, std::ostream& out);

// Aligned plain-text rendering: one block per learning-set size with the
// six DIFF/RDIFF columns per criterion, p-values parenthesized to two
// decimals.
void render_report_table(const std::vector<ReportRow>& rows, std::ostream& out);
void render_baseline_table(const std::vector<BaselineSummary>& summaries, std::ostream& out);

}  // namespace cpdp

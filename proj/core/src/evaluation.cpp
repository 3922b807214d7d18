#include "cpdp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include "cpdp/error.hpp"

namespace cpdp {

double final_auc(const std::vector<bool>& final_prediction,
                 const std::vector<bool>& true_labels) {
    if (final_prediction.size() != true_labels.size())
        throw Error("final_auc: length mismatch");
    if (final_prediction.empty()) throw Error("final_auc: no modules");
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < final_prediction.size(); ++i) {
        const bool pred = final_prediction[i], label = true_labels[i];
        if (pred && label) ++tp;
        else if (pred && !label) ++fp;
        else if (!pred && label) ++fn;
        else ++tn;
    }
    return arm_auc(tp, fp, tn, fn);
}

long long count_found_defects(const std::vector<bool>& final_prediction,
                              const std::vector<bool>& true_labels) {
    if (final_prediction.size() != true_labels.size())
        throw Error("count_found_defects: length mismatch");
    long long tp = 0;
    for (std::size_t i = 0; i < final_prediction.size(); ++i)
        if (final_prediction[i] && true_labels[i]) ++tp;
    return tp;
}

CriterionSet evaluate_outcome(const ApproachOutcome& outcome) {
    CriterionSet c;
    c.auc = final_auc(outcome.run.final_prediction, outcome.run.true_labels);
    c.found_defects = count_found_defects(outcome.run.final_prediction, outcome.run.true_labels);
    c.retests = static_cast<long long>(
        std::count_if(outcome.retest_log.begin(), outcome.retest_log.end(),
                      [](const RetestLogEntry& e) { return e.retested; }));
    return c;
}

double diff(double a, double b) { return b - a; }

double rdiff(double a, double b) {
    if (a == 0.0) throw Error("rdiff: zero denominator");
    return b / a - 1.0;
}

namespace {

// Average ranks of |d| with tie groups.
struct RankedDiffs {
    std::vector<double> ranks;  // aligned with diffs
};

RankedDiffs rank_absolute(const std::vector<double>& diffs) {
    const std::size_t n = diffs.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(diffs[a]) < std::abs(diffs[b]);
    });
    RankedDiffs out;
    out.ranks.assign(n, 0.0);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && std::abs(diffs[idx[j]]) == std::abs(diffs[idx[i]])) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) out.ranks[idx[k]] = avg_rank;
        i = j;
    }
    return out;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / 1.4142135623730951); }

// Exact null distribution of W+ by dynamic programming over doubled
// ranks (average ranks are half-integers, so doubling makes them exact
// integers). Equivalent to enumerating all 2^n sign assignments.
double exact_two_sided_p(const std::vector<double>& ranks, double w_plus) {
    const std::size_t n = ranks.size();
    std::size_t total2 = 0;
    std::vector<std::size_t> r2(n);
    for (std::size_t i = 0; i < n; ++i) {
        r2[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
        total2 += r2[i];
    }
    std::vector<double> count(total2 + 1, 0.0);
    count[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
        reach += r2[i];
        for (std::size_t s = reach + 1; s-- > r2[i];) count[s] += count[s - r2[i]];
    }
    const double denom = std::ldexp(1.0, static_cast<int>(n));  // 2^n
    const std::size_t w2 = static_cast<std::size_t>(std::llround(2.0 * w_plus));
    double lower = 0.0, upper = 0.0;
    for (std::size_t s = 0; s <= total2; ++s) {
        if (s <= w2) lower += count[s];
        if (s >= w2) upper += count[s];
    }
    return std::min(1.0, 2.0 * std::min(lower, upper) / denom);
}

// Normal approximation with continuity correction plus the one-term
// Edgeworth kurtosis refinement. Computing the moments from the average
// ranks makes the variance exactly the classic tie-corrected form
// n(n+1)(2n+1)/24 - sum(t^3-t)/48 and gives the matching fourth cumulant.
double approx_two_sided_p(const RankedDiffs& ranked, double w_plus) {
    const double n = static_cast<double>(ranked.ranks.size());
    const double mean = n * (n + 1.0) / 4.0;
    double var = 0.0, kappa4 = 0.0;
    for (double r : ranked.ranks) {
        var += r * r / 4.0;
        kappa4 -= r * r * r * r / 8.0;
    }
    if (var <= 0.0) return 1.0;
    const double d = w_plus - mean;
    if (d == 0.0) return 1.0;
    const double z = std::max((std::abs(d) - 0.5) / std::sqrt(var), 0.0);
    const double gamma2 = kappa4 / (var * var);
    const double phi = std::exp(-0.5 * z * z) / 2.5066282746310002;  // sqrt(2*pi)
    double sf = normal_sf(z) + phi * (gamma2 / 24.0) * (z * z * z - 3.0 * z);
    sf = std::clamp(sf, 0.0, 1.0);
    return std::min(1.0, 2.0 * sf);
}

struct WPlus {
    RankedDiffs ranked;
    double w_plus = 0.0;
    bool all_zero = false;
};

WPlus compute_w_plus(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.empty()) throw Error("wilcoxon_signed_rank: no pairs");
    std::vector<double> diffs;
    diffs.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        const double d = b - a;
        if (d != 0.0) diffs.push_back(d);
    }
    WPlus out;
    if (diffs.empty()) {
        out.all_zero = true;
        return out;
    }
    out.ranked = rank_absolute(diffs);
    for (std::size_t i = 0; i < diffs.size(); ++i)
        if (diffs[i] > 0.0) out.w_plus += out.ranked.ranks[i];
    return out;
}

}  // namespace

double wilcoxon_signed_rank_exact(const std::vector<std::pair<double, double>>& pairs) {
    const WPlus w = compute_w_plus(pairs);
    if (w.all_zero) return 1.0;
    return exact_two_sided_p(w.ranked.ranks, w.w_plus);
}

double wilcoxon_signed_rank_approx(const std::vector<std::pair<double, double>>& pairs) {
    const WPlus w = compute_w_plus(pairs);
    if (w.all_zero) return 1.0;
    return approx_two_sided_p(w.ranked, w.w_plus);
}

double wilcoxon_signed_rank(const std::vector<std::pair<double, double>>& pairs) {
    const WPlus w = compute_w_plus(pairs);
    if (w.all_zero) return 1.0;  // no signal
    if (w.ranked.ranks.size() <= 25) return exact_two_sided_p(w.ranked.ranks, w.w_plus);
    return approx_two_sided_p(w.ranked, w.w_plus);
}

namespace {

double criterion_value(const CriterionSet& c, const std::string& criterion) {
    if (criterion == "auc") return c.auc;
    if (criterion == "found_defects") return static_cast<double>(c.found_defects);
    throw Error("unknown criterion '" + criterion + "'");
}

std::optional<double> mean_of(const std::vector<RepetitionResult>& results,
                              std::optional<CriterionSet> RepetitionResult::*approach,
                              const std::string& criterion) {
    double sum = 0.0;
    for (const auto& r : results) {
        const auto& c = r.*approach;
        if (!c) return std::nullopt;
        sum += criterion_value(*c, criterion);
    }
    return sum / static_cast<double>(results.size());
}

struct PairColumns {
    std::optional<double> diff, rdiff, rdiff_rep, p;
};

PairColumns compare(const std::vector<RepetitionResult>& results,
                    std::optional<CriterionSet> RepetitionResult::*from,
                    std::optional<CriterionSet> RepetitionResult::*to,
                    const std::string& criterion) {
    PairColumns out;
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(results.size());
    for (const auto& r : results) {
        const auto& a = r.*from;
        const auto& b = r.*to;
        if (!a || !b) return out;  // approach not configured
        pairs.emplace_back(criterion_value(*a, criterion), criterion_value(*b, criterion));
    }
    double mean_a = 0.0, mean_b = 0.0;
    for (const auto& [a, b] : pairs) {
        mean_a += a;
        mean_b += b;
    }
    mean_a /= static_cast<double>(pairs.size());
    mean_b /= static_cast<double>(pairs.size());
    out.diff = diff(mean_a, mean_b);
    if (mean_a != 0.0) out.rdiff = rdiff(mean_a, mean_b);
    double rdiff_sum = 0.0;
    std::size_t rdiff_n = 0;
    for (const auto& [a, b] : pairs) {
        if (a != 0.0) {
            rdiff_sum += rdiff(a, b);
            ++rdiff_n;
        }
    }
    if (rdiff_n > 0) out.rdiff_rep = rdiff_sum / static_cast<double>(rdiff_n);
    out.p = wilcoxon_signed_rank(pairs);
    return out;
}

void assert_found_defect_monotonicity(const std::vector<RepetitionResult>& results) {
    for (const auto& r : results) {
        if (r.baseline && r.retest && r.retest->found_defects < r.baseline->found_defects)
            throw Error("paired-trace violation: retest found fewer defects than baseline in "
                        "repetition " + std::to_string(r.repetition_index));
        if (r.retest && r.multiple && r.multiple->found_defects < r.retest->found_defects)
            throw Error("paired-trace violation: multiple retests found fewer defects than "
                        "retest in repetition " + std::to_string(r.repetition_index));
    }
}

}  // namespace

std::vector<ReportRow> aggregate(const std::vector<RepetitionResult>& results) {
    if (results.empty()) throw Error("aggregate: no repetition results");
    for (const auto& r : results)
        if (r.policy_name != results.front().policy_name ||
            r.n_projects != results.front().n_projects)
            throw Error("aggregate: mixed (policy, n_projects) grouping keys");
    assert_found_defect_monotonicity(results);

    std::vector<ReportRow> rows;
    for (const std::string criterion : {"auc", "found_defects"}) {
        ReportRow row;
        row.policy_name = results.front().policy_name;
        row.n_projects = results.front().n_projects;
        row.criterion = criterion;
        row.mean_baseline = mean_of(results, &RepetitionResult::baseline, criterion);
        row.mean_retest = mean_of(results, &RepetitionResult::retest, criterion);
        row.mean_multiple = mean_of(results, &RepetitionResult::multiple, criterion);

        const auto br = compare(results, &RepetitionResult::baseline,
                                &RepetitionResult::retest, criterion);
        const auto bmr = compare(results, &RepetitionResult::baseline,
                                 &RepetitionResult::multiple, criterion);
        const auto rmr = compare(results, &RepetitionResult::retest,
                                 &RepetitionResult::multiple, criterion);
        row.diff_b_r = br.diff;
        row.rdiff_b_r = br.rdiff;
        row.rdiff_rep_b_r = br.rdiff_rep;
        row.p_b_r = br.p;
        row.diff_b_mr = bmr.diff;
        row.rdiff_b_mr = bmr.rdiff;
        row.rdiff_rep_b_mr = bmr.rdiff_rep;
        row.p_b_mr = bmr.p;
        row.diff_r_mr = rmr.diff;
        row.rdiff_r_mr = rmr.rdiff;
        row.rdiff_rep_r_mr = rmr.rdiff_rep;
        row.p_r_mr = rmr.p;
        rows.push_back(std::move(row));
    }
    return rows;
}

BaselineSummary baseline_summary(const std::vector<RepetitionResult>& results) {
    if (results.empty()) throw Error("baseline_summary: no repetition results");
    BaselineSummary s;
    s.policy_name = results.front().policy_name;
    s.n_projects = results.front().n_projects;
    s.repetitions = results.size();
    double auc_sum = 0.0, found_sum = 0.0, retest_sum = 0.0, multi_sum = 0.0;
    bool have_r = true, have_mr = true;
    for (const auto& r : results) {
        if (!r.baseline) throw Error("baseline_summary: repetition without baseline criteria");
        auc_sum += r.baseline->auc;
        found_sum += static_cast<double>(r.baseline->found_defects);
        if (r.retest) retest_sum += static_cast<double>(r.retest->retests);
        else have_r = false;
        if (r.multiple) multi_sum += static_cast<double>(r.multiple->retests);
        else have_mr = false;
    }
    const double n = static_cast<double>(results.size());
    s.mean_auc = auc_sum / n;
    s.mean_found_defects = found_sum / n;
    if (have_r) s.mean_retests_retest = retest_sum / n;
    if (have_mr) s.mean_retests_multiple = multi_sum / n;
    return s;
}

namespace {

std::optional<double> optional_mean(const std::vector<std::optional<double>>& values) {
    double sum = 0.0;
    for (const auto& v : values) {
        if (!v) return std::nullopt;
        sum += *v;
    }
    return values.empty() ? std::nullopt
                          : std::optional<double>(sum / static_cast<double>(values.size()));
}

std::optional<double> pooled_p(const std::vector<RepetitionResult>& pooled,
                               std::optional<CriterionSet> RepetitionResult::*from,
                               std::optional<CriterionSet> RepetitionResult::*to,
                               const std::string& criterion) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& r : pooled) {
        const auto& a = r.*from;
        const auto& b = r.*to;
        if (!a || !b) return std::nullopt;
        pairs.emplace_back(criterion_value(*a, criterion), criterion_value(*b, criterion));
    }
    if (pairs.empty()) return std::nullopt;
    return wilcoxon_signed_rank(pairs);
}

}  // namespace

ReportRow average_row(const std::vector<ReportRow>& rows,
                      const std::vector<RepetitionResult>& pooled_results,
                      const std::string& criterion) {
    std::vector<const ReportRow*> picked;
    for (const auto& r : rows)
        if (r.criterion == criterion) picked.push_back(&r);
    if (picked.empty()) throw Error("average_row: no rows for criterion '" + criterion + "'");

    ReportRow avg;
    avg.policy_name = "average";
    avg.n_projects = picked.front()->n_projects;
    avg.criterion = criterion;
    auto collect = [&](std::optional<double> ReportRow::*member) {
        std::vector<std::optional<double>> vals;
        for (const ReportRow* r : picked) vals.push_back(r->*member);
        return optional_mean(vals);
    };
    avg.mean_baseline = collect(&ReportRow::mean_baseline);
    avg.mean_retest = collect(&ReportRow::mean_retest);
    avg.mean_multiple = collect(&ReportRow::mean_multiple);
    avg.diff_b_r = collect(&ReportRow::diff_b_r);
    avg.diff_b_mr = collect(&ReportRow::diff_b_mr);
    avg.diff_r_mr = collect(&ReportRow::diff_r_mr);
    avg.rdiff_b_r = collect(&ReportRow::rdiff_b_r);
    avg.rdiff_b_mr = collect(&ReportRow::rdiff_b_mr);
    avg.rdiff_r_mr = collect(&ReportRow::rdiff_r_mr);
    avg.rdiff_rep_b_r = collect(&ReportRow::rdiff_rep_b_r);
    avg.rdiff_rep_b_mr = collect(&ReportRow::rdiff_rep_b_mr);
    avg.rdiff_rep_r_mr = collect(&ReportRow::rdiff_rep_r_mr);
    avg.p_b_r = pooled_p(pooled_results, &RepetitionResult::baseline, &RepetitionResult::retest,
                         criterion);
    avg.p_b_mr = pooled_p(pooled_results, &RepetitionResult::baseline,
                          &RepetitionResult::multiple, criterion);
    avg.p_r_mr = pooled_p(pooled_results, &RepetitionResult::retest, &RepetitionResult::multiple,
                          criterion);
    return avg;
}

namespace {

std::string cell(const std::optional<double>& v) {
    if (!v) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", *v);
    return buf;
}

std::string fixed_cell(const std::optional<double>& v, int prec) {
    if (!v) return "n/a";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, *v);
    return buf;
}

std::string percent_cell(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.1f%%", *v * 100.0);
    return buf;
}

std::string diff_with_p(const std::optional<double>& d, const std::optional<double>& p,
                        int prec) {
    if (!d) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f (%.2f)", prec, *d, p ? *p : 1.0);
    return buf;
}

void pad(std::ostream& out, const std::string& s, std::size_t width) {
    out << s;
    for (std::size_t i = s.size(); i < width; ++i) out << ' ';
}

}  // namespace

void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out) {
    out << "n_projects,policy,criterion,mean_baseline,mean_retest,mean_multiple,"
           "diff_b_r,diff_b_mr,diff_r_mr,rdiff_b_r,rdiff_b_mr,rdiff_r_mr,"
           "rdiff_rep_b_r,rdiff_rep_b_mr,rdiff_rep_r_mr,p_b_r,p_b_mr,p_r_mr\n";
    for (const auto& r : rows) {
        out << r.n_projects << ',' << r.policy_name << ',' << r.criterion << ','
            << cell(r.mean_baseline) << ',' << cell(r.mean_retest) << ','
            << cell(r.mean_multiple) << ',' << cell(r.diff_b_r) << ',' << cell(r.diff_b_mr)
            << ',' << cell(r.diff_r_mr) << ',' << cell(r.rdiff_b_r) << ',' << cell(r.rdiff_b_mr)
            << ',' << cell(r.rdiff_r_mr) << ',' << cell(r.rdiff_rep_b_r) << ','
            << cell(r.rdiff_rep_b_mr) << ',' << cell(r.rdiff_rep_r_mr) << ',' << cell(r.p_b_r)
            << ',' << cell(r.p_b_mr) << ',' << cell(r.p_r_mr) << '\n';
    }
}

void write_baseline_csv(const std::vector<BaselineSummary>& summaries, std::ostream& out) {
    out << "n_projects,policy,repetitions,mean_auc,mean_found_defects,"
           "mean_retests_retest,mean_retests_multiple\n";
    for (const auto& s : summaries) {
        out << s.n_projects << ',' << s.policy_name << ',' << s.repetitions << ','
            << cell(s.mean_auc) << ',' << cell(s.mean_found_defects) << ','
            << cell(s.mean_retests_retest) << ',' << cell(s.mean_retests_multiple) << '\n';
    }
}

void render_report_table(const std::vector<ReportRow>& rows, std::ostream& out) {
    std::set<std::size_t> sizes;
    for (const auto& r : rows) sizes.insert(r.n_projects);
    const std::size_t w = 15;
    for (std::size_t size : sizes) {
        out << "== " << size << " learning projects ==\n";
        for (const std::string criterion : {"auc", "found_defects"}) {
            out << (criterion == std::string("auc") ? "criterion: AUC"
                                                    : "criterion: number of found defects")
                << '\n';
            pad(out, "policy", 12);
            for (const char* h : {"DIFF(B,R)", "DIFF(B,MR)", "DIFF(R,MR)", "RDIFF(B,R)",
                                  "RDIFF(B,MR)", "RDIFF(R,MR)"})
                pad(out, h, w);
            out << '\n';
            const int prec = criterion == std::string("auc") ? 3 : 1;
            for (const auto& r : rows) {
                if (r.n_projects != size || r.criterion != criterion) continue;
                pad(out, r.policy_name, 12);
                pad(out, diff_with_p(r.diff_b_r, r.p_b_r, prec), w);
                pad(out, diff_with_p(r.diff_b_mr, r.p_b_mr, prec), w);
                pad(out, diff_with_p(r.diff_r_mr, r.p_r_mr, prec), w);
                pad(out, percent_cell(r.rdiff_b_r), w);
                pad(out, percent_cell(r.rdiff_b_mr), w);
                pad(out, percent_cell(r.rdiff_r_mr), w);
                out << '\n';
            }
        }
        out << '\n';
    }
}

void render_baseline_table(const std::vector<BaselineSummary>& summaries, std::ostream& out) {
    out << "baseline performance\n";
    pad(out, "policy", 12);
    pad(out, "projects", 10);
    pad(out, "AUC", 8);
    pad(out, "found", 8);
    pad(out, "retests(R)", 12);
    pad(out, "retests(MR)", 12);
    out << '\n';
    for (const auto& s : summaries) {
        pad(out, s.policy_name, 12);
        pad(out, std::to_string(s.n_projects), 10);
        pad(out, fixed_cell(s.mean_auc, 3), 8);
        pad(out, fixed_cell(s.mean_found_defects, 1), 8);
        pad(out, fixed_cell(s.mean_retests_retest, 1), 12);
        pad(out, fixed_cell(s.mean_retests_multiple, 1), 12);
        out << '\n';
    }
}

}  // namespace cpdp

#include "cpdp/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "cpdp/error.hpp"

namespace cpdp {

namespace {

void check_matrix(const FeatureMatrix& rows) {
    if (rows.size() < 2) throw TrainingError("need at least 2 rows");
    const std::size_t d = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != d) throw TrainingError("ragged feature matrix");
}

bool one_class(const std::vector<bool>& labels) {
    return std::all_of(labels.begin(), labels.end(), [](bool b) { return b; }) ||
           std::all_of(labels.begin(), labels.end(), [](bool b) { return !b; });
}

std::vector<double> column(const FeatureMatrix& rows, std::size_t j) {
    std::vector<double> col(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) col[i] = rows[i][j];
    return col;
}

std::vector<double> labels_as_reals(const std::vector<bool>& labels) {
    std::vector<double> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] ? 1.0 : 0.0;
    return y;
}

// log(1 + exp(z)) without overflow.
double log1pexp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

StandardizationParams standardize_fit(const FeatureMatrix& rows) {
    check_matrix(rows);
    const std::size_t n = rows.size();
    const std::size_t d = rows.front().size();
    StandardizationParams p;
    p.mean.assign(d, 0.0);
    p.scale.assign(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        for (const auto& r : rows) sum += r[j];
        p.mean[j] = sum / static_cast<double>(n);
        double ss = 0.0;
        for (const auto& r : rows) {
            const double dlt = r[j] - p.mean[j];
            ss += dlt * dlt;
        }
        const double var = ss / static_cast<double>(n - 1);
        p.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return p;
}

std::vector<double> standardize_apply(const StandardizationParams& params,
                                      const std::vector<double>& features) {
    if (features.size() != params.mean.size())
        throw Error("feature vector size does not match standardization schema");
    std::vector<double> out(features.size());
    for (std::size_t j = 0; j < features.size(); ++j)
        out[j] = (features[j] - params.mean[j]) / params.scale[j];
    return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw Error("pearson: length mismatch");
    if (x.size() < 2) throw Error("pearson: need at least 2 points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

namespace {

double merit_from_correlations(const std::vector<double>& rcf,
                               const std::vector<std::vector<double>>& rff,
                               const std::vector<std::size_t>& subset) {
    const double k = static_cast<double>(subset.size());
    double cf = 0.0;
    for (std::size_t idx : subset) cf += std::abs(rcf[idx]);
    cf /= k;
    double ff = 0.0;
    if (subset.size() > 1) {
        for (std::size_t a = 0; a < subset.size(); ++a)
            for (std::size_t b = a + 1; b < subset.size(); ++b)
                ff += std::abs(rff[subset[a]][subset[b]]);
        ff /= (k * (k - 1.0) / 2.0);
    }
    return k * cf / std::sqrt(k + k * (k - 1.0) * ff);
}

}  // namespace

double cfs_merit(const FeatureMatrix& rows, const std::vector<bool>& labels,
                 const std::vector<std::size_t>& subset) {
    check_matrix(rows);
    if (subset.empty()) throw Error("cfs_merit: empty subset");
    const std::size_t d = rows.front().size();
    const auto y = labels_as_reals(labels);
    std::vector<double> rcf(d, 0.0);
    std::vector<std::vector<double>> rff(d, std::vector<double>(d, 1.0));
    for (std::size_t j : subset) rcf[j] = pearson(column(rows, j), y);
    for (std::size_t a = 0; a < subset.size(); ++a)
        for (std::size_t b = a + 1; b < subset.size(); ++b) {
            const double r = pearson(column(rows, subset[a]), column(rows, subset[b]));
            rff[subset[a]][subset[b]] = rff[subset[b]][subset[a]] = r;
        }
    return merit_from_correlations(rcf, rff, subset);
}

FeatureSubset cfs_select(const FeatureMatrix& rows, const std::vector<bool>& labels,
                         std::string* warning) {
    check_matrix(rows);
    if (labels.size() != rows.size()) throw TrainingError("cfs_select: label count mismatch");
    if (one_class(labels)) throw TrainingError("one-class label vector");

    const std::size_t d = rows.front().size();
    const auto y = labels_as_reals(labels);

    std::vector<std::vector<double>> cols(d);
    for (std::size_t j = 0; j < d; ++j) cols[j] = column(rows, j);

    std::vector<double> rcf(d);
    for (std::size_t j = 0; j < d; ++j) rcf[j] = pearson(cols[j], y);

    const bool all_zero = std::all_of(rcf.begin(), rcf.end(), [](double r) { return r == 0.0; });
    if (all_zero) {
        if (warning)
            *warning = "all feature-label correlations are zero; falling back to the full feature set";
        FeatureSubset full;
        full.indices.resize(d);
        std::iota(full.indices.begin(), full.indices.end(), 0);
        full.merit = 0.0;
        return full;
    }

    // Pairwise feature correlations, computed on demand.
    std::vector<std::vector<double>> rff(d, std::vector<double>(d, 2.0));  // 2 = not yet computed
    auto pair_corr = [&](std::size_t a, std::size_t b) {
        if (rff[a][b] == 2.0) rff[a][b] = rff[b][a] = (a == b ? 1.0 : pearson(cols[a], cols[b]));
        return rff[a][b];
    };

    auto merit_of = [&](const std::vector<std::size_t>& subset) {
        const double k = static_cast<double>(subset.size());
        double cf = 0.0;
        for (std::size_t idx : subset) cf += std::abs(rcf[idx]);
        cf /= k;
        double ff = 0.0;
        if (subset.size() > 1) {
            for (std::size_t a = 0; a < subset.size(); ++a)
                for (std::size_t b = a + 1; b < subset.size(); ++b)
                    ff += std::abs(pair_corr(subset[a], subset[b]));
            ff /= (k * (k - 1.0) / 2.0);
        }
        return k * cf / std::sqrt(k + k * (k - 1.0) * ff);
    };

    std::size_t seed = 0;
    for (std::size_t j = 1; j < d; ++j)
        if (std::abs(rcf[j]) > std::abs(rcf[seed])) seed = j;

    std::vector<std::size_t> selected{seed};
    std::vector<bool> in_set(d, false);
    in_set[seed] = true;
    double best_merit = merit_of(selected);

    for (;;) {
        double candidate_merit = best_merit;
        std::size_t candidate = d;
        for (std::size_t j = 0; j < d; ++j) {
            if (in_set[j]) continue;
            selected.push_back(j);
            const double m = merit_of(selected);
            selected.pop_back();
            if (m > candidate_merit) {
                candidate_merit = m;
                candidate = j;
            }
        }
        if (candidate == d) break;  // no strict improvement
        selected.push_back(candidate);
        in_set[candidate] = true;
        best_merit = candidate_merit;
    }

    std::sort(selected.begin(), selected.end());
    return FeatureSubset{std::move(selected), best_merit};
}

double logistic_loss(const FeatureMatrix& rows, const std::vector<bool>& labels,
                     const std::vector<double>& weights, double bias, double l2_lambda) {
    const double n = static_cast<double>(rows.size());
    double nll = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double z = bias;
        for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * rows[i][j];
        nll += log1pexp(z) - (labels[i] ? z : 0.0);
    }
    double penalty = 0.0;
    for (double w : weights) penalty += w * w;
    return nll / n + l2_lambda * penalty;
}

std::vector<double> logistic_gradient(const FeatureMatrix& rows,
                                      const std::vector<bool>& labels,
                                      const std::vector<double>& weights, double bias,
                                      double l2_lambda) {
    const double n = static_cast<double>(rows.size());
    std::vector<double> grad(weights.size() + 1, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double z = bias;
        for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * rows[i][j];
        const double resid = sigmoid(z) - (labels[i] ? 1.0 : 0.0);
        for (std::size_t j = 0; j < weights.size(); ++j) grad[j] += resid * rows[i][j];
        grad.back() += resid;
    }
    for (double& g : grad) g /= n;
    for (std::size_t j = 0; j < weights.size(); ++j) grad[j] += 2.0 * l2_lambda * weights[j];
    return grad;
}

LogisticFit train_logistic(const FeatureMatrix& rows, const std::vector<bool>& labels,
                           const LogisticOptions& options) {
    check_matrix(rows);
    if (labels.size() != rows.size()) throw TrainingError("train_logistic: label count mismatch");
    if (one_class(labels)) throw TrainingError("one-class training data");

    const std::size_t d = rows.front().size();
    LogisticFit fit;
    fit.weights.assign(d, 0.0);
    fit.bias = 0.0;

    double loss = logistic_loss(rows, labels, fit.weights, fit.bias, options.l2_lambda);
    if (!std::isfinite(loss)) throw TrainingError("non-finite loss at initialization");
    fit.loss_trace.push_back(loss);

    double step = 1.0;
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        const auto grad =
            logistic_gradient(rows, labels, fit.weights, fit.bias, options.l2_lambda);
        double gmax = 0.0, gsq = 0.0;
        for (double g : grad) {
            gmax = std::max(gmax, std::abs(g));
            gsq += g * g;
        }
        if (gmax < options.gradient_tol) break;

        // Armijo backtracking keeps the accepted loss sequence monotone.
        bool accepted = false;
        while (step > 1e-18) {
            std::vector<double> w_try(fit.weights);
            for (std::size_t j = 0; j < d; ++j) w_try[j] -= step * grad[j];
            const double b_try = fit.bias - step * grad.back();
            const double loss_try = logistic_loss(rows, labels, w_try, b_try, options.l2_lambda);
            if (std::isfinite(loss_try) && loss_try <= loss - 1e-4 * step * gsq) {
                fit.weights = std::move(w_try);
                fit.bias = b_try;
                loss = loss_try;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflow: at numerical optimum
        fit.loss_trace.push_back(loss);
        fit.iterations = iter + 1;
        step = std::min(step * 2.0, 1e6);
    }
    if (!std::isfinite(loss)) throw TrainingError("non-finite loss");
    for (double w : fit.weights)
        if (!std::isfinite(w)) throw TrainingError("non-finite weight");
    fit.loss = loss;
    return fit;
}

double predict_prob(const DefectModel& model, const ModuleRecord& module) {
    if (module.features.size() != model.standardization.mean.size())
        throw Error("module features do not cover the model schema");
    double z = model.bias;
    for (std::size_t j = 0; j < model.subset.indices.size(); ++j) {
        const std::size_t idx = model.subset.indices[j];
        const double x = (module.features[idx] - model.standardization.mean[idx]) /
                         model.standardization.scale[idx];
        z += model.weights[j] * x;
    }
    return sigmoid(z);
}

bool predict_label(const DefectModel& model, const ModuleRecord& module) {
    return predict_prob(model, module) >= model.threshold;
}

DefectModel train_defect_model(const ProjectDataset& project, const LogisticOptions& options) {
    if (project.modules.size() < 2)
        throw TrainingError("project '" + project.name + "': need at least 2 modules");
    FeatureMatrix rows;
    rows.reserve(project.modules.size());
    std::vector<bool> labels;
    labels.reserve(project.modules.size());
    for (const auto& m : project.modules) {
        rows.push_back(m.features);
        labels.push_back(m.label);
    }

    DefectModel model;
    model.source_project = project.name;
    model.standardization = standardize_fit(rows);
    model.subset = cfs_select(rows, labels);

    FeatureMatrix sub(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto z = standardize_apply(model.standardization, rows[i]);
        sub[i].reserve(model.subset.indices.size());
        for (std::size_t idx : model.subset.indices) sub[i].push_back(z[idx]);
    }
    const LogisticFit fit = train_logistic(sub, labels, options);
    model.weights = fit.weights;
    model.bias = fit.bias;
    model.threshold = 0.5;
    return model;
}

std::vector<DefectModel> build_arm_models(const std::vector<const ProjectDataset*>& projects,
                                          std::vector<std::string>* warnings,
                                          const LogisticOptions& options) {
    std::vector<DefectModel> models;
    models.reserve(projects.size());
    for (const ProjectDataset* p : projects) {
        try {
            models.push_back(train_defect_model(*p, options));
        } catch (const Error& e) {
            if (warnings)
                warnings->push_back("dropping project '" + p->name + "': " + e.what());
        }
    }
    if (models.size() < 2)
        throw TrainingError("fewer than 2 arms: only " + std::to_string(models.size()) +
                            " of " + std::to_string(projects.size()) + " projects trainable");
    return models;
}

std::vector<DefectModel> build_arm_models(const std::vector<ProjectDataset>& projects,
                                          std::vector<std::string>* warnings,
                                          const LogisticOptions& options) {
    std::vector<const ProjectDataset*> ptrs;
    ptrs.reserve(projects.size());
    for (const auto& p : projects) ptrs.push_back(&p);
    return build_arm_models(ptrs, warnings, options);
}

void write_model(const DefectModel& model, std::ostream& out) {
    out << "project " << model.source_project << '\n';
    out << "subset";
    for (std::size_t idx : model.subset.indices) out << ' ' << idx;
    out << '\n' << "merit " << model.subset.merit << '\n';
    out << "mean";
    for (double v : model.standardization.mean) out << ' ' << v;
    out << '\n' << "scale";
    for (double v : model.standardization.scale) out << ' ' << v;
    out << '\n' << "weights";
    for (double v : model.weights) out << ' ' << v;
    out << '\n' << "bias " << model.bias << '\n';
    out << "threshold " << model.threshold << '\n';
}

}  // namespace cpdp

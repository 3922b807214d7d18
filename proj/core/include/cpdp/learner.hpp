#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "cpdp/dataset.hpp"

namespace cpdp {

// Row-major feature matrix: one row per module, columns follow the
// dataset's metric schema.
using FeatureMatrix = std::vector<std::vector<double>>;

struct StandardizationParams {
    std::vector<double> mean;   // per feature, schema order
    std::vector<double> scale;  // sample std (n-1); constant columns get 1

    bool operator==(const StandardizationParams&) const = default;
};

struct FeatureSubset {
    std::vector<std::size_t> indices;  // strictly increasing
    double merit = 0.0;
};

struct DefectModel {
    std::string source_project;
    StandardizationParams standardization;
    FeatureSubset subset;
    std::vector<double> weights;  // one per subset index
    double bias = 0.0;
    double threshold = 0.5;
};

// Column means and sample standard deviations (n-1 divisor). Needs at
// least two rows; zero-deviation columns get scale 1 so standardization
// maps them to a constant 0 instead of dividing by zero.
StandardizationParams standardize_fit(const FeatureMatrix& rows);

std::vector<double> standardize_apply(const StandardizationParams& params,
                                      const std::vector<double>& features);

// Pearson product-moment correlation; 0 when either vector is constant.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Subset merit k*rcf / sqrt(k + k(k-1)*rff) with rcf the mean absolute
// feature-label correlation and rff the mean absolute pairwise feature
// correlation. Exposed so tests can evaluate candidate subsets directly.
double cfs_merit(const FeatureMatrix& rows, const std::vector<bool>& labels,
                 const std::vector<std::size_t>& subset);

// Greedy forward search over cfs_merit, seeded with the single best
// feature, adding the best-improving feature until no addition increases
// merit. If every feature-label correlation is exactly zero the full
// feature set is returned and a warning is emitted.
FeatureSubset cfs_select(const FeatureMatrix& rows, const std::vector<bool>& labels,
                         std::string* warning = nullptr);

struct LogisticFit {
    std::vector<double> weights;
    double bias = 0.0;
    std::size_t iterations = 0;
    double loss = 0.0;
    std::vector<double> loss_trace;  // one entry per accepted iterate
};

struct LogisticOptions {
    double l2_lambda = 1e-4;     // bias unpenalized
    double gradient_tol = 1e-6;  // max-norm stopping criterion
    std::size_t max_iterations = 10000;
};

// Mean negative log-likelihood plus l2_lambda * ||w||^2.
double logistic_loss(const FeatureMatrix& rows, const std::vector<bool>& labels,
                     const std::vector<double>& weights, double bias, double l2_lambda);

// Analytic gradient of logistic_loss; returned as d+1 values, bias last.
std::vector<double> logistic_gradient(const FeatureMatrix& rows,
                                      const std::vector<bool>& labels,
                                      const std::vector<double>& weights, double bias,
                                      double l2_lambda);

// Backtracking gradient descent from zero initialization. The accepted
// loss sequence is non-increasing by construction.
LogisticFit train_logistic(const FeatureMatrix& rows, const std::vector<bool>& labels,
                           const LogisticOptions& options = {});

double predict_prob(const DefectModel& model, const ModuleRecord& module);
bool predict_label(const DefectModel& model, const ModuleRecord& module);

// Full per-project pipeline: standardize, CFS, logistic fit.
DefectModel train_defect_model(const ProjectDataset& project,
                               const LogisticOptions& options = {});

// One model per learning project, input order preserved. Projects whose
// training fails are dropped with a warning; fewer than two surviving
// models aborts, since the bandit needs at least two arms.
std::vector<DefectModel> build_arm_models(const std::vector<const ProjectDataset*>& projects,
                                          std::vector<std::string>* warnings = nullptr,
                                          const LogisticOptions& options = {});
std::vector<DefectModel> build_arm_models(const std::vector<ProjectDataset>& projects,
                                          std::vector<std::string>* warnings = nullptr,
                                          const LogisticOptions& options = {});

// Debugging form: project name, subset, means, scales, weights, bias.
void write_model(const DefectModel& model, std::ostream& out);

}  // namespace cpdp

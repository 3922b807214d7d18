#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cpdp/random.hpp"

namespace cpdp {

// One source module: metric values aligned with the owning dataset's
// metric_schema, plus the recorded defect count and its binarized label.
struct ModuleRecord {
    std::string id;
    std::vector<double> features;
    long long defect_count = 0;
    bool label = false;

    bool operator==(const ModuleRecord&) const = default;
};

struct ProjectDataset {
    std::string name;
    std::vector<std::string> metric_schema;
    std::vector<ModuleRecord> modules;

    double defect_rate() const;
    std::size_t defective_count() const;

    bool operator==(const ProjectDataset&) const = default;
};

// All projects of one experiment. Insertion into a std::map keeps name
// iteration order canonical, which the seeded project sampling relies on.
struct ProjectRegistry {
    std::map<std::string, ProjectDataset> projects;
    std::string target_name;

    const ProjectDataset& target() const;
    std::vector<std::string> non_target_names() const;
    void add(ProjectDataset dataset);
    void validate() const;  // target present, schemas identical
};

// true iff the module carries at least one recorded defect.
bool binarize_label(long long defect_count);

// Reads a header-bearing comma-separated project file. All columns other
// than id_column and label_column become the metric schema, in header
// order. Malformed cells are reported with row and column names.
ProjectDataset load_project(const std::string& path,
                            const std::string& label_column = "bug",
                            const std::string& id_column = "name");

ProjectDataset read_project_csv(std::istream& in, const std::string& origin,
                                const std::string& label_column,
                                const std::string& id_column);

// Inverse of load_project; feature values round-trip exactly.
void save_project(const ProjectDataset& dataset, const std::string& path,
                  const std::string& label_column = "bug",
                  const std::string& id_column = "name");
void write_project_csv(const ProjectDataset& dataset, std::ostream& out,
                       const std::string& label_column,
                       const std::string& id_column);

// Draws k distinct learning-project names, uniformly without replacement,
// from the registry excluding the target. Candidate order is the sorted
// registry order, so the result is a pure function of the stream state.
std::vector<std::string> select_learning_projects(const ProjectRegistry& registry,
                                                  std::size_t k,
                                                  RandomStream& rng);

// Synthesizes a CK-style project: Bernoulli(defect_rate) labels and
// Gaussian metrics whose means shift by signal_strength-scaled offsets on
// defective modules. signal_strength 0 makes features label-independent.
ProjectDataset generate_synthetic_project(const std::string& name,
                                          std::size_t n_modules,
                                          double defect_rate,
                                          std::size_t n_metrics,
                                          double signal_strength,
                                          RandomStream& rng);

// 64-bit FNV-1a over a dataset's canonical CSV form; used for manifest
// fingerprints.
std::uint64_t dataset_fingerprint(const ProjectDataset& dataset);

}  // namespace cpdp

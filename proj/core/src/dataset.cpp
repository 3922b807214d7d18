#include "cpdp/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "cpdp/error.hpp"

namespace cpdp {

double ProjectDataset::defect_rate() const {
    if (modules.empty()) return 0.0;
    return static_cast<double>(defective_count()) / static_cast<double>(modules.size());
}

std::size_t ProjectDataset::defective_count() const {
    return static_cast<std::size_t>(
        std::count_if(modules.begin(), modules.end(), [](const ModuleRecord& m) { return m.label; }));
}

const ProjectDataset& ProjectRegistry::target() const {
    auto it = projects.find(target_name);
    if (it == projects.end()) throw DataError("target project '" + target_name + "' not in registry");
    return it->second;
}

std::vector<std::string> ProjectRegistry::non_target_names() const {
    std::vector<std::string> names;
    names.reserve(projects.size());
    for (const auto& [name, _] : projects)
        if (name != target_name) names.push_back(name);
    return names;
}

void ProjectRegistry::add(ProjectDataset dataset) {
    std::string name = dataset.name;
    if (projects.count(name)) throw DataError("duplicate project '" + name + "'");
    projects.emplace(std::move(name), std::move(dataset));
}

void ProjectRegistry::validate() const {
    if (!projects.count(target_name))
        throw DataError("target project '" + target_name + "' not in registry");
    const auto& schema = projects.begin()->second.metric_schema;
    for (const auto& [name, ds] : projects) {
        if (ds.metric_schema != schema)
            throw DataError("metric schema of project '" + name + "' differs from '" +
                            projects.begin()->first + "'; refusing to mix schemas");
    }
}

bool binarize_label(long long defect_count) {
    if (defect_count < 0) throw DataError("negative defect count");
    return defect_count > 0;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    cells.push_back(cell);
    for (auto& s : cells) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    }
    return cells;
}

double parse_numeric_cell(const std::string& cell, std::size_t row,
                          const std::string& column, const std::string& origin) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    if (cell.empty() || end != begin + cell.size() || !std::isfinite(v)) {
        throw DataError(origin + ": non-numeric value '" + cell + "' in row " +
                        std::to_string(row) + ", column '" + column + "'");
    }
    return v;
}

// Shortest decimal form that round-trips the double exactly.
std::string format_double(double v) {
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace

ProjectDataset read_project_csv(std::istream& in, const std::string& origin,
                                const std::string& label_column,
                                const std::string& id_column) {
    std::string line;
    if (!std::getline(in, line)) throw DataError(origin + ": empty file, no header");
    const auto header = split_csv_line(line);

    std::set<std::string> seen;
    for (const auto& h : header) {
        if (!seen.insert(h).second)
            throw DataError(origin + ": duplicate header column '" + h + "'");
    }

    std::size_t id_idx = header.size(), label_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == id_column) id_idx = i;
        if (header[i] == label_column) label_idx = i;
    }
    if (id_idx == header.size())
        throw DataError(origin + ": id column '" + id_column + "' missing from header");
    if (label_idx == header.size())
        throw DataError(origin + ": label column '" + label_column + "' missing from header");

    ProjectDataset ds;
    ds.name = origin;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != id_idx && i != label_idx) ds.metric_schema.push_back(header[i]);

    std::set<std::string> ids;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError(origin + ": row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(header.size()));
        ModuleRecord m;
        m.id = cells[id_idx];
        if (!ids.insert(m.id).second)
            throw DataError(origin + ": duplicate module id '" + m.id + "' in row " +
                            std::to_string(row));
        const double raw_count = parse_numeric_cell(cells[label_idx], row, label_column, origin);
        if (raw_count < 0)
            throw DataError(origin + ": negative defect count in row " + std::to_string(row));
        m.defect_count = std::llround(raw_count);
        m.label = binarize_label(m.defect_count);
        m.features.reserve(ds.metric_schema.size());
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i == id_idx || i == label_idx) continue;
            m.features.push_back(parse_numeric_cell(cells[i], row, header[i], origin));
        }
        ds.modules.push_back(std::move(m));
    }
    if (ds.modules.empty()) throw DataError(origin + ": empty dataset (header only, no rows)");
    return ds;
}

ProjectDataset load_project(const std::string& path, const std::string& label_column,
                            const std::string& id_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file '" + path + "'");
    ProjectDataset ds = read_project_csv(in, path, label_column, id_column);
    // Project name = file stem.
    std::string stem = path;
    if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (const auto dot = stem.find_last_of('.'); dot != std::string::npos && dot > 0)
        stem = stem.substr(0, dot);
    ds.name = stem;
    return ds;
}

void write_project_csv(const ProjectDataset& dataset, std::ostream& out,
                       const std::string& label_column, const std::string& id_column) {
    out << id_column;
    for (const auto& m : dataset.metric_schema) out << ',' << m;
    out << ',' << label_column << '\n';
    for (const auto& mod : dataset.modules) {
        out << mod.id;
        for (double v : mod.features) out << ',' << format_double(v);
        out << ',' << mod.defect_count << '\n';
    }
}

void save_project(const ProjectDataset& dataset, const std::string& path,
                  const std::string& label_column, const std::string& id_column) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write dataset file '" + path + "'");
    write_project_csv(dataset, out, label_column, id_column);
}

std::vector<std::string> select_learning_projects(const ProjectRegistry& registry,
                                                  std::size_t k, RandomStream& rng) {
    std::vector<std::string> pool = registry.non_target_names();
    if (k == 0) throw ConfigError("learning-set size must be positive");
    if (k > pool.size())
        throw ConfigError("requested " + std::to_string(k) + " learning projects but only " +
                          std::to_string(pool.size()) + " non-target projects are available");
    // Partial Fisher-Yates: the first k slots are the draws, in draw order.
    std::vector<std::string> picked;
    picked.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
        picked.push_back(pool[i]);
    }
    return picked;
}

ProjectDataset generate_synthetic_project(const std::string& name, std::size_t n_modules,
                                          double defect_rate, std::size_t n_metrics,
                                          double signal_strength, RandomStream& rng) {
    if (n_modules == 0) throw ConfigError("synthetic project needs at least one module");
    if (n_metrics == 0) throw ConfigError("synthetic project needs at least one metric");
    if (defect_rate <= 0.0 || defect_rate >= 1.0)
        throw ConfigError("synthetic defect_rate must lie strictly inside (0,1)");
    if (signal_strength < 0.0) throw ConfigError("signal_strength must be non-negative");

    static const char* ck_names[] = {"wmc", "dit", "noc", "cbo", "rfc", "lcom"};

    ProjectDataset ds;
    ds.name = name;
    ds.metric_schema.reserve(n_metrics);
    for (std::size_t j = 0; j < n_metrics; ++j) {
        if (j < 6) ds.metric_schema.emplace_back(ck_names[j]);
        else ds.metric_schema.push_back("m" + std::to_string(j + 1));
    }

    // Per-metric mean shift for defective modules; later metrics carry less
    // signal so feature selection has something to discriminate.
    std::vector<double> shift(n_metrics);
    for (std::size_t j = 0; j < n_metrics; ++j)
        shift[j] = signal_strength / (1.0 + 0.5 * static_cast<double>(j));

    ds.modules.reserve(n_modules);
    for (std::size_t i = 0; i < n_modules; ++i) {
        ModuleRecord m;
        m.id = "mod" + std::to_string(i + 1);
        m.label = rng.bernoulli(defect_rate);
        m.defect_count = m.label ? 1 + static_cast<long long>(rng.below(3)) : 0;
        m.features.resize(n_metrics);
        for (std::size_t j = 0; j < n_metrics; ++j)
            m.features[j] = rng.gaussian() + (m.label ? shift[j] : 0.0);
        ds.modules.push_back(std::move(m));
    }
    return ds;
}

std::uint64_t dataset_fingerprint(const ProjectDataset& dataset) {
    std::ostringstream oss;
    write_project_csv(dataset, oss, "bug", "name");
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : oss.str()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace cpdp

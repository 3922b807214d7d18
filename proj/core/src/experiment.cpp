#include "cpdp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "cpdp/error.hpp"
#include "cpdp/learner.hpp"

namespace cpdp {

namespace fs = std::filesystem;

std::string ExperimentConfig::resolved_target() const {
    if (!target.empty()) return target;
    return dataset_dir.empty() ? "target" : "arc";
}

ExperimentConfig make_default_config() {
    ExperimentConfig c;
    c.policies = {PolicyKind::epsilon_greedy(0.0), PolicyKind::epsilon_greedy(0.1),
                  PolicyKind::epsilon_greedy(0.2), PolicyKind::epsilon_greedy(0.3),
                  PolicyKind::ucb()};
    c.approaches = {ApproachKind::baseline(), ApproachKind::retest(),
                    ApproachKind::multiple_retests(2)};
    return c;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream iss(s);
    while (std::getline(iss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

long long parse_int(const std::string& v, const std::string& key, std::size_t line) {
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "' expects an integer, got '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& v, const std::string& key, std::size_t line) {
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 0);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "' expects an unsigned integer, got '" + v + "'");
    return x;
}

double parse_real(const std::string& v, const std::string& key, std::size_t line) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "' expects a number, got '" + v + "'");
    return x;
}

bool parse_bool(const std::string& v, const std::string& key, std::size_t line) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "' expects true/false, got '" + v + "'");
}

void validate_config(const ExperimentConfig& c) {
    if (c.repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (c.sizes.empty()) throw ConfigError("sizes must not be empty");
    for (std::size_t s : c.sizes)
        if (s < 2) throw ConfigError("each learning-set size must be at least 2");
    if (std::set<std::size_t>(c.sizes.begin(), c.sizes.end()).size() != c.sizes.size())
        throw ConfigError("sizes must be distinct");
    if (c.policies.empty()) throw ConfigError("policies must not be empty");
    {
        std::set<std::string> names;
        for (const auto& p : c.policies)
            if (!names.insert(p.name()).second)
                throw ConfigError("duplicate policy '" + p.name() + "'");
    }
    if (c.approaches.empty()) throw ConfigError("approaches must not be empty");
    {
        std::set<int> kinds;
        for (const auto& a : c.approaches)
            if (!kinds.insert(static_cast<int>(a.kind)).second)
                throw ConfigError("duplicate approach '" + a.name() + "'");
    }
    if (c.p_overlook < 0.0 || c.p_overlook > 1.0)
        throw ConfigError("overlook probability must lie in [0,1]");
    if (c.threads < 1) throw ConfigError("threads must be at least 1");
    if (c.synthetic.pool_projects < 3)
        throw ConfigError("synthetic pool needs at least 3 projects");
    if (c.synthetic.target_defect_rate <= 0.0 || c.synthetic.target_defect_rate >= 1.0)
        throw ConfigError("synthetic target defect rate must lie inside (0,1)");
    if (c.synthetic.defect_rate_min <= 0.0 || c.synthetic.defect_rate_max >= 1.0 ||
        c.synthetic.defect_rate_min > c.synthetic.defect_rate_max)
        throw ConfigError("synthetic defect-rate range must satisfy 0 < min <= max < 1");
    if (c.synthetic.signal_min < 0.0 || c.synthetic.signal_min > c.synthetic.signal_max)
        throw ConfigError("synthetic signal range must satisfy 0 <= min <= max");
    if (c.synthetic.learn_modules_min < 2 ||
        c.synthetic.learn_modules_min > c.synthetic.learn_modules_max)
        throw ConfigError("synthetic learning-module range must satisfy 2 <= min <= max");
    if (c.dataset_dir.empty()) {
        const std::size_t available = c.synthetic.pool_projects - 1;
        for (std::size_t s : c.sizes)
            if (s > available)
                throw ConfigError("learning-set size " + std::to_string(s) + " exceeds the " +
                                  std::to_string(available) + " synthetic learning projects");
    }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig c = make_default_config();
    std::istringstream iss(text);
    std::string line;
    std::size_t lineno = 0;
    std::set<std::string> seen;
    while (std::getline(iss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + " line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second)
            throw ConfigError(origin + " line " + std::to_string(lineno) + ": duplicate key '" +
                              key + "'");

        if (key == "dataset_dir") c.dataset_dir = value;
        else if (key == "id_column") c.id_column = value;
        else if (key == "label_column") c.label_column = value;
        else if (key == "target") c.target = value;
        else if (key == "sizes") {
            c.sizes.clear();
            for (const auto& item : split_list(value))
                c.sizes.push_back(static_cast<std::size_t>(parse_int(item, key, lineno)));
        } else if (key == "policies") {
            c.policies.clear();
            for (const auto& item : split_list(value)) c.policies.push_back(PolicyKind::parse(item));
        } else if (key == "approaches") {
            c.approaches.clear();
            for (const auto& item : split_list(value))
                c.approaches.push_back(ApproachKind::parse(item));
        } else if (key == "repetitions") {
            const long long reps = parse_int(value, key, lineno);
            if (reps < 1)
                throw ConfigError(origin + " line " + std::to_string(lineno) +
                                  ": repetitions must be at least 1");
            c.repetitions = static_cast<std::size_t>(reps);
        } else if (key == "overlook") c.p_overlook = parse_real(value, key, lineno);
        else if (key == "seed") c.master_seed = parse_u64(value, key, lineno);
        else if (key == "reward_auc") {
            if (value == "binary") c.reward_auc = RewardAucMode::Binary;
            else if (value == "probability") c.reward_auc = RewardAucMode::Probability;
            else
                throw ConfigError(origin + " line " + std::to_string(lineno) +
                                  ": reward_auc must be 'binary' or 'probability'");
        } else if (key == "retest_noise") c.retest_noise = parse_bool(value, key, lineno);
        else if (key == "resample_per_repetition")
            c.resample_per_repetition = parse_bool(value, key, lineno);
        else if (key == "repredict_with_policy")
            c.repredict_with_policy = parse_bool(value, key, lineno);
        else if (key == "write_traces") c.write_traces = parse_bool(value, key, lineno);
        else if (key == "threads") c.threads = static_cast<std::size_t>(parse_int(value, key, lineno));
        else if (key == "output_dir") c.output_dir = value;
        else if (key == "synthetic_pool")
            c.synthetic.pool_projects = static_cast<std::size_t>(parse_int(value, key, lineno));
        else if (key == "synthetic_target_modules")
            c.synthetic.target_modules = static_cast<std::size_t>(parse_int(value, key, lineno));
        else if (key == "synthetic_target_defect_rate")
            c.synthetic.target_defect_rate = parse_real(value, key, lineno);
        else if (key == "synthetic_metrics")
            c.synthetic.metrics = static_cast<std::size_t>(parse_int(value, key, lineno));
        else if (key == "synthetic_target_signal")
            c.synthetic.target_signal = parse_real(value, key, lineno);
        else if (key == "synthetic_signal_min") c.synthetic.signal_min = parse_real(value, key, lineno);
        else if (key == "synthetic_signal_max") c.synthetic.signal_max = parse_real(value, key, lineno);
        else if (key == "synthetic_defect_min")
            c.synthetic.defect_rate_min = parse_real(value, key, lineno);
        else if (key == "synthetic_defect_max")
            c.synthetic.defect_rate_max = parse_real(value, key, lineno);
        else if (key == "synthetic_learn_modules_min")
            c.synthetic.learn_modules_min = static_cast<std::size_t>(parse_int(value, key, lineno));
        else if (key == "synthetic_learn_modules_max")
            c.synthetic.learn_modules_max = static_cast<std::size_t>(parse_int(value, key, lineno));
        else
            throw ConfigError(origin + " line " + std::to_string(lineno) + ": unknown key '" +
                              key + "'");
    }
    validate_config(c);
    return c;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

void write_config(const ExperimentConfig& c, std::ostream& out) {
    char buf[64];
    auto real = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "dataset_dir = " << c.dataset_dir << '\n';
    out << "id_column = " << c.id_column << '\n';
    out << "label_column = " << c.label_column << '\n';
    out << "target = " << c.resolved_target() << '\n';
    out << "sizes = ";
    for (std::size_t i = 0; i < c.sizes.size(); ++i) out << (i ? "," : "") << c.sizes[i];
    out << '\n' << "policies = ";
    for (std::size_t i = 0; i < c.policies.size(); ++i)
        out << (i ? "," : "") << c.policies[i].name();
    out << '\n' << "approaches = ";
    for (std::size_t i = 0; i < c.approaches.size(); ++i)
        out << (i ? "," : "") << c.approaches[i].name();
    out << '\n';
    out << "repetitions = " << c.repetitions << '\n';
    out << "overlook = " << real(c.p_overlook) << '\n';
    out << "seed = " << c.master_seed << '\n';
    out << "reward_auc = " << (c.reward_auc == RewardAucMode::Binary ? "binary" : "probability")
        << '\n';
    out << "retest_noise = " << (c.retest_noise ? "true" : "false") << '\n';
    out << "resample_per_repetition = " << (c.resample_per_repetition ? "true" : "false") << '\n';
    out << "repredict_with_policy = " << (c.repredict_with_policy ? "true" : "false") << '\n';
    out << "write_traces = " << (c.write_traces ? "true" : "false") << '\n';
    // threads and output_dir are not echoed: they place the computation
    // without affecting any reported number.
    if (c.dataset_dir.empty()) {
        out << "synthetic_pool = " << c.synthetic.pool_projects << '\n';
        out << "synthetic_target_modules = " << c.synthetic.target_modules << '\n';
        out << "synthetic_target_defect_rate = " << real(c.synthetic.target_defect_rate) << '\n';
        out << "synthetic_metrics = " << c.synthetic.metrics << '\n';
        out << "synthetic_target_signal = " << real(c.synthetic.target_signal) << '\n';
        out << "synthetic_signal_min = " << real(c.synthetic.signal_min) << '\n';
        out << "synthetic_signal_max = " << real(c.synthetic.signal_max) << '\n';
        out << "synthetic_defect_min = " << real(c.synthetic.defect_rate_min) << '\n';
        out << "synthetic_defect_max = " << real(c.synthetic.defect_rate_max) << '\n';
        out << "synthetic_learn_modules_min = " << c.synthetic.learn_modules_min << '\n';
        out << "synthetic_learn_modules_max = " << c.synthetic.learn_modules_max << '\n';
    }
}

SeedRecord derive_repetition_seeds(std::uint64_t master_seed, const std::string& policy_name,
                                   std::size_t size, std::size_t repetition,
                                   bool resample_per_repetition) {
    const std::string cell = "cell/" + policy_name + "/" + std::to_string(size);
    SeedRecord s;
    s.repetition = derive_seed(master_seed, cell + "/rep" + std::to_string(repetition));
    s.sampling = resample_per_repetition ? derive_seed(s.repetition, "sampling")
                                         : derive_seed(master_seed, cell + "/sampling");
    s.order = derive_seed(s.repetition, "order");
    s.policy = derive_seed(s.repetition, "policy");
    s.noise = derive_seed(s.repetition, "noise");
    s.retest_noise = derive_seed(s.repetition, "retest-noise");
    return s;
}

namespace {

std::string pad_index(std::size_t i, std::size_t width) {
    std::string s = std::to_string(i);
    while (s.size() < width) s.insert(s.begin(), '0');
    return s;
}

ProjectRegistry build_synthetic_registry(const ExperimentConfig& config) {
    const SyntheticSpec& spec = config.synthetic;
    RandomStream pool_rng(derive_seed(config.master_seed, "pool"));
    ProjectRegistry reg;
    reg.target_name = config.resolved_target();
    reg.add(generate_synthetic_project(reg.target_name, spec.target_modules,
                                       spec.target_defect_rate, spec.metrics,
                                       spec.target_signal, pool_rng));
    const std::size_t learners = spec.pool_projects - 1;
    const std::size_t width = std::to_string(learners).size();
    for (std::size_t i = 1; i <= learners; ++i) {
        const std::size_t n_modules =
            spec.learn_modules_min +
            static_cast<std::size_t>(
                pool_rng.below(spec.learn_modules_max - spec.learn_modules_min + 1));
        const double defect_rate =
            spec.defect_rate_min +
            (spec.defect_rate_max - spec.defect_rate_min) * pool_rng.uniform();
        const double signal =
            spec.signal_min + (spec.signal_max - spec.signal_min) * pool_rng.uniform();
        reg.add(generate_synthetic_project("learn" + pad_index(i, width), n_modules, defect_rate,
                                           spec.metrics, signal, pool_rng));
    }
    return reg;
}

ProjectRegistry build_file_registry(const ExperimentConfig& config) {
    if (!fs::is_directory(config.dataset_dir))
        throw DataError("dataset directory '" + config.dataset_dir + "' does not exist");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(config.dataset_dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".csv") files.push_back(entry.path());
    }
    if (files.empty())
        throw DataError("dataset directory '" + config.dataset_dir + "' holds no .csv files");
    std::sort(files.begin(), files.end());
    ProjectRegistry reg;
    reg.target_name = config.resolved_target();
    for (const auto& f : files)
        reg.add(load_project(f.string(), config.label_column, config.id_column));
    return reg;
}

}  // namespace

ProjectRegistry build_registry(const ExperimentConfig& config) {
    ProjectRegistry reg = config.dataset_dir.empty() ? build_synthetic_registry(config)
                                                     : build_file_registry(config);
    reg.validate();
    return reg;
}

namespace {

// Trained models are pure functions of their project (deterministic
// optimizer, zero init), so each pool project is trained at most once
// and shared read-only across repetitions.
struct ModelCache {
    std::map<std::string, DefectModel> models;
    std::vector<std::string> warnings;

    void train_all(const ProjectRegistry& registry) {
        for (const auto& [name, project] : registry.projects) {
            if (name == registry.target_name) continue;
            try {
                models.emplace(name, train_defect_model(project));
            } catch (const Error& e) {
                warnings.push_back("dropping project '" + name + "': " + e.what());
            }
        }
    }
};

struct RepetitionData {
    RepetitionResult result;
    SimulationRun baseline;
    std::vector<std::pair<ApproachKind, ApproachOutcome>> outcomes;
};

struct ExperimentContext {
    const ExperimentConfig& config;
    const ProjectRegistry& registry;
    const ModelCache& cache;
};

RepetitionData run_single_repetition(const ExperimentContext& ctx, const PolicyKind& policy,
                                     std::size_t size, std::size_t repetition) {
    const ExperimentConfig& cfg = ctx.config;
    RepetitionData data;
    RepetitionResult& rep = data.result;
    rep.repetition_index = repetition;
    rep.policy_name = policy.name();
    rep.n_projects = size;
    rep.seeds = derive_repetition_seeds(cfg.master_seed, rep.policy_name, size, repetition,
                                        cfg.resample_per_repetition);

    RandomStream sampling_rng(rep.seeds.sampling);
    rep.learning_projects = select_learning_projects(ctx.registry, size, sampling_rng);

    std::vector<DefectModel> models;
    models.reserve(size);
    for (const auto& name : rep.learning_projects) {
        const auto it = ctx.cache.models.find(name);
        if (it != ctx.cache.models.end()) models.push_back(it->second);
    }
    if (models.size() < 2)
        throw TrainingError("fewer than 2 arms after dropping untrainable projects");

    const OverlookModel overlook{cfg.p_overlook};
    RandomStream order_rng(rep.seeds.order);
    RandomStream policy_rng(rep.seeds.policy);
    RandomStream noise_rng(rep.seeds.noise);
    const auto order = make_order(ctx.registry.target().modules.size(), order_rng);

    data.baseline = run_baseline(models, ctx.registry.target(), order, policy, overlook,
                                 policy_rng, noise_rng, cfg.reward_auc);
    data.baseline.seeds = rep.seeds;

    RetestOptions opts;
    opts.apply_overlook_noise = cfg.retest_noise;
    opts.reselect_policy = cfg.repredict_with_policy ? &policy : nullptr;

    for (const auto& approach : cfg.approaches) {
        ApproachOutcome outcome = run_approach(data.baseline, approach, overlook,
                                               RandomStream(rep.seeds.retest_noise), opts);
        const CriterionSet criteria = evaluate_outcome(outcome);
        switch (approach.kind) {
            case ApproachKind::Kind::Baseline: rep.baseline = criteria; break;
            case ApproachKind::Kind::Retest: rep.retest = criteria; break;
            case ApproachKind::Kind::MultipleRetests: rep.multiple = criteria; break;
        }
        data.outcomes.emplace_back(approach, std::move(outcome));
    }
    return data;
}

std::string trace_file_name(const std::string& policy_name, std::size_t size,
                            std::size_t repetition) {
    std::string p = policy_name;
    for (char& ch : p)
        if (ch == ':' || ch == '.') ch = '_';
    return "trace_" + p + "_" + std::to_string(size) + "_rep" + std::to_string(repetition) +
           ".csv";
}

void write_trace_sections(const RepetitionData& data, std::ostream& out) {
    out << "# baseline\n";
    write_baseline_trace(data.baseline, out);
    for (const auto& [approach, outcome] : data.outcomes) {
        if (approach.kind == ApproachKind::Kind::Baseline) continue;
        out << "# approach " << approach.name() << "\n";
        write_retest_trace(outcome.run, outcome.retest_log, out);
    }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const ProjectRegistry registry = build_registry(config);
    ModelCache cache;
    cache.train_all(registry);

    ExperimentResult result;
    result.warnings = cache.warnings;

    if (config.write_traces) fs::create_directories(config.output_dir);

    struct Task {
        std::size_t policy_index, size, repetition, slot;
    };
    std::vector<Task> tasks;
    for (std::size_t size : config.sizes)
        for (std::size_t pi = 0; pi < config.policies.size(); ++pi)
            for (std::size_t r = 0; r < config.repetitions; ++r)
                tasks.push_back({pi, size, r, tasks.size()});

    std::vector<RepetitionResult> slots(tasks.size());
    std::vector<std::string> failures(tasks.size());
    const ExperimentContext ctx{config, registry, cache};

    std::atomic<std::size_t> next{0};
    std::mutex io_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& t = tasks[i];
            const PolicyKind& policy = config.policies[t.policy_index];
            try {
                RepetitionData data = run_single_repetition(ctx, policy, t.size, t.repetition);
                if (config.write_traces) {
                    const fs::path path =
                        fs::path(config.output_dir) /
                        trace_file_name(policy.name(), t.size, t.repetition);
                    std::lock_guard<std::mutex> lock(io_mutex);
                    std::ofstream out(path);
                    write_trace_sections(data, out);
                }
                slots[t.slot] = std::move(data.result);
            } catch (const Error& e) {
                failures[t.slot] = e.what();
            }
        }
    };

    if (config.threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < config.threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // A failed repetition aborts its whole (policy, size) cell.
    std::set<std::pair<std::string, std::size_t>> aborted;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (failures[i].empty()) continue;
        const auto key = std::make_pair(config.policies[tasks[i].policy_index].name(),
                                        tasks[i].size);
        if (aborted.insert(key).second)
            result.aborted_cells.push_back("cell policy=" + key.first + " size=" +
                                           std::to_string(key.second) + ": " + failures[i]);
    }

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto key = std::make_pair(config.policies[tasks[i].policy_index].name(),
                                        tasks[i].size);
        if (!aborted.count(key)) result.repetitions.push_back(slots[i]);
    }

    // Per-cell rows, then per-size average rows over the surviving cells.
    for (std::size_t size : config.sizes) {
        std::vector<ReportRow> size_rows;
        std::vector<RepetitionResult> pooled;
        for (const auto& policy : config.policies) {
            const std::string pname = policy.name();
            std::vector<RepetitionResult> cell;
            for (const auto& r : result.repetitions)
                if (r.policy_name == pname && r.n_projects == size) cell.push_back(r);
            if (cell.empty()) continue;
            auto rows = aggregate(cell);
            size_rows.insert(size_rows.end(), rows.begin(), rows.end());
            result.baselines.push_back(baseline_summary(cell));
            pooled.insert(pooled.end(), cell.begin(), cell.end());
        }
        if (size_rows.empty()) continue;
        result.rows.insert(result.rows.end(), size_rows.begin(), size_rows.end());
        result.rows.push_back(average_row(size_rows, pooled, "auc"));
        result.rows.push_back(average_row(size_rows, pooled, "found_defects"));
    }
    return result;
}

void write_manifest(const ExperimentConfig& config, const ProjectRegistry& registry,
                    const ExperimentResult& result, std::ostream& out) {
    out << "manifest " << kArtifactVersion << "\n\n== config ==\n";
    write_config(config, out);
    out << "\n== datasets ==\n";
    char buf[64];
    for (const auto& [name, ds] : registry.projects) {
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(dataset_fingerprint(ds)));
        out << "project " << name << " modules " << ds.modules.size() << " defective "
            << ds.defective_count() << " fingerprint " << buf << '\n';
    }
    if (!result.warnings.empty()) {
        out << "\n== warnings ==\n";
        for (const auto& w : result.warnings) out << w << '\n';
    }
    if (!result.aborted_cells.empty()) {
        out << "\n== aborted cells ==\n";
        for (const auto& a : result.aborted_cells) out << a << '\n';
    }
    out << "\n== repetitions ==\n";
    auto criteria = [&](const std::optional<CriterionSet>& c) -> std::string {
        if (!c) return "-";
        std::snprintf(buf, sizeof(buf), "auc=%.6f found=%lld retests=%lld", c->auc,
                      c->found_defects, c->retests);
        return buf;
    };
    for (const auto& r : result.repetitions) {
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(r.seeds.repetition));
        out << "rep policy=" << r.policy_name << " size=" << r.n_projects << " index="
            << r.repetition_index << " seed=" << buf << " projects=";
        for (std::size_t i = 0; i < r.learning_projects.size(); ++i)
            out << (i ? "," : "") << r.learning_projects[i];
        out << "\n  baseline " << criteria(r.baseline) << "\n  retest   " << criteria(r.retest)
            << "\n  multiple " << criteria(r.multiple) << '\n';
    }
}

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result) {
    fs::create_directories(config.output_dir);
    const fs::path dir(config.output_dir);
    {
        std::ofstream out(dir / "report_table1.csv");
        if (!out) throw Error("cannot write report_table1.csv");
        write_report_csv(result.rows, out);
    }
    {
        std::ofstream out(dir / "report_table2.csv");
        if (!out) throw Error("cannot write report_table2.csv");
        write_baseline_csv(result.baselines, out);
    }
    {
        std::ofstream out(dir / "report_table1.txt");
        render_report_table(result.rows, out);
    }
    {
        std::ofstream out(dir / "report_table2.txt");
        render_baseline_table(result.baselines, out);
    }
    {
        std::ofstream out(dir / "manifest.txt");
        const ProjectRegistry registry = build_registry(config);
        write_manifest(config, registry, result, out);
    }
}

void emit_trace(const ExperimentConfig& config, const PolicyKind& policy, std::size_t size,
                std::size_t repetition, std::ostream& out) {
    if (repetition >= config.repetitions)
        throw ConfigError("repetition index " + std::to_string(repetition) +
                          " out of range (config has " + std::to_string(config.repetitions) +
                          ")");
    const ProjectRegistry registry = build_registry(config);
    ModelCache cache;
    cache.train_all(registry);
    const ExperimentContext ctx{config, registry, cache};
    const RepetitionData data = run_single_repetition(ctx, policy, size, repetition);
    write_trace_sections(data, out);
}

RepetitionResult replay_repetition(const ExperimentConfig& config, const PolicyKind& policy,
                                   std::size_t size, std::size_t repetition) {
    if (repetition >= config.repetitions)
        throw ConfigError("repetition index " + std::to_string(repetition) +
                          " out of range (config has " + std::to_string(config.repetitions) +
                          ")");
    const ProjectRegistry registry = build_registry(config);
    ModelCache cache;
    cache.train_all(registry);
    const ExperimentContext ctx{config, registry, cache};
    return run_single_repetition(ctx, policy, size, repetition).result;
}

}  // namespace cpdp

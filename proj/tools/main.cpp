#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cpdp/error.hpp"
#include "cpdp/experiment.hpp"
#include "selftest.hpp"

namespace {

cpdp::ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) return cpdp::make_default_config();
    return cpdp::parse_config(path);
}

int cmd_run(const std::string& config_path, const std::string& seed_override,
            const std::string& output_override, unsigned threads_override) {
    cpdp::ExperimentConfig cfg = load_config(config_path);
    if (!seed_override.empty()) cfg.master_seed = std::stoull(seed_override, nullptr, 0);
    if (!output_override.empty()) cfg.output_dir = output_override;
    if (threads_override > 0) cfg.threads = threads_override;

    const auto result = cpdp::run_experiment(cfg);
    cpdp::write_outputs(cfg, result);

    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& a : result.aborted_cells) std::cerr << "aborted: " << a << '\n';
    cpdp::render_baseline_table(result.baselines, std::cout);
    std::cout << '\n';
    cpdp::render_report_table(result.rows, std::cout);
    std::cout << "reports written to " << cfg.output_dir << '\n';
    return 0;
}

int cmd_trace(const std::string& config_path, const std::string& policy_text, std::size_t size,
              std::size_t repetition, const std::string& out_path) {
    cpdp::ExperimentConfig cfg = load_config(config_path);
    const cpdp::PolicyKind policy = cpdp::PolicyKind::parse(policy_text);
    if (out_path.empty() || out_path == "-") {
        cpdp::emit_trace(cfg, policy, size, repetition, std::cout);
    } else {
        std::ofstream out(out_path);
        if (!out) throw cpdp::Error("cannot write trace file '" + out_path + "'");
        cpdp::emit_trace(cfg, policy, size, repetition, out);
        std::cout << "trace written to " << out_path << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bandit-based cross-project defect prediction simulator"};
    app.require_subcommand(1);

    std::string config_path, seed_override, output_override;
    unsigned threads_override = 0;
    auto* run = app.add_subcommand("run", "run the configured experiment matrix");
    run->add_option("-c,--config", config_path, "config file (key = value lines)");
    run->add_option("-s,--seed", seed_override, "master seed override");
    run->add_option("-o,--output", output_override, "output directory override");
    run->add_option("-t,--threads", threads_override, "worker thread override");

    std::string trace_config, trace_policy = "epsilon:0", trace_out;
    std::size_t trace_size = 8, trace_rep = 0;
    auto* trace = app.add_subcommand("trace", "replay one repetition and emit its trace");
    trace->add_option("-c,--config", trace_config, "config file");
    trace->add_option("-p,--policy", trace_policy, "policy name, e.g. epsilon:0.1 or ucb");
    trace->add_option("-n,--size", trace_size, "learning-set size");
    trace->add_option("-r,--rep", trace_rep, "repetition index");
    trace->add_option("-o,--out", trace_out, "trace file path (default: stdout)");

    auto* selftest = app.add_subcommand("selftest", "run the built-in property checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, seed_override, output_override, threads_override);
        if (trace->parsed())
            return cmd_trace(trace_config, trace_policy, trace_size, trace_rep, trace_out);
        if (selftest->parsed()) return run_selftest() == 0 ? 0 : 1;
    } catch (const cpdp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "cpdp/dataset.hpp"
#include "cpdp/evaluation.hpp"
#include "cpdp/learner.hpp"
#include "cpdp/reprediction.hpp"
#include "cpdp/simulator.hpp"

namespace {

using namespace cpdp;

ProjectDataset bench_project(std::uint64_t seed, std::size_t modules) {
    RandomStream rng(seed);
    return generate_synthetic_project("bench" + std::to_string(seed), modules, 0.25, 6, 1.3,
                                      rng);
}

void BM_TrainDefectModel(benchmark::State& state) {
    const auto project = bench_project(1, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_defect_model(project));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TrainDefectModel)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void BM_CfsSelect(benchmark::State& state) {
    const auto project = bench_project(2, 200);
    FeatureMatrix rows;
    std::vector<bool> labels;
    for (const auto& m : project.modules) {
        rows.push_back(m.features);
        labels.push_back(m.label);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(cfs_select(rows, labels));
    }
}
BENCHMARK(BM_CfsSelect);

void BM_BaselineRun(benchmark::State& state) {
    std::vector<ProjectDataset> learning;
    for (int i = 0; i < 8; ++i) learning.push_back(bench_project(10 + i, 150));
    const auto target = bench_project(99, static_cast<std::size_t>(state.range(0)));
    const auto models = build_arm_models(learning);

    for (auto _ : state) {
        RandomStream order_rng(1), policy_rng(2), noise_rng(3);
        const auto order = make_order(target.modules.size(), order_rng);
        benchmark::DoNotOptimize(run_baseline(models, target, order,
                                              PolicyKind::epsilon_greedy(0.1), OverlookModel{},
                                              policy_rng, noise_rng));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BaselineRun)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void BM_RetestApproach(benchmark::State& state) {
    std::vector<ProjectDataset> learning;
    for (int i = 0; i < 8; ++i) learning.push_back(bench_project(20 + i, 150));
    const auto target = bench_project(98, 235);
    const auto models = build_arm_models(learning);
    RandomStream order_rng(1), policy_rng(2), noise_rng(3);
    const auto order = make_order(target.modules.size(), order_rng);
    const auto baseline = run_baseline(models, target, order, PolicyKind::ucb(),
                                       OverlookModel{}, policy_rng, noise_rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_approach(baseline, ApproachKind::multiple_retests(2),
                                              OverlookModel{}, RandomStream(7)));
    }
}
BENCHMARK(BM_RetestApproach);

void BM_WilcoxonExact(benchmark::State& state) {
    RandomStream rng(5);
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < state.range(0); ++i) pairs.emplace_back(rng.gaussian(), rng.gaussian());
    for (auto _ : state) {
        benchmark::DoNotOptimize(wilcoxon_signed_rank_exact(pairs));
    }
}
BENCHMARK(BM_WilcoxonExact)->Arg(12)->Arg(25);

void BM_WilcoxonApprox(benchmark::State& state) {
    RandomStream rng(6);
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < 40; ++i) pairs.emplace_back(rng.gaussian(), rng.gaussian());
    for (auto _ : state) {
        benchmark::DoNotOptimize(wilcoxon_signed_rank(pairs));
    }
}
BENCHMARK(BM_WilcoxonApprox);

}  // namespace

BENCHMARK_MAIN();

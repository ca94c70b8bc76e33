// Serial reference vs OpenMP trial kernels on the two Monte Carlo workloads
// that dominate run time, plus the threshold sweep.

#include <benchmark/benchmark.h>

#include "aqst/adaptive.hpp"
#include "aqst/criteria_opt.hpp"

namespace {

using namespace aqst;

const ReadoutModel kModel = ReadoutModel::calibrated();

BlochVector worst_state() { return extremal_bloch(alphas(kModel, 0.11)).worst; }

void BM_StandardTrials(benchmark::State& state) {
  const auto exec = state.range(0) == 0 ? Execution::serial : Execution::parallel;
  ProtocolConfig cfg;
  cfg.n_total = 30000;
  const TrialPlan plan{7, "bench/standard", std::size_t(state.range(1)), exec};
  for (auto _ : state) {
    auto runs = run_standard_trials(worst_state(), kModel, cfg, plan);
    benchmark::DoNotOptimize(runs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(1) * cfg.n_total);
  state.SetLabel(exec == Execution::serial ? "serial" : "openmp");
}

void BM_AqstTrials(benchmark::State& state) {
  const auto exec = state.range(0) == 0 ? Execution::serial : Execution::parallel;
  ProtocolConfig cfg;
  cfg.n_pre = 27000;
  cfg.n_total = 57000;
  const TrialPlan plan{7, "bench/aqst", std::size_t(state.range(1)), exec};
  const AqstOptions options{ImperfectionModel::reference(), false};
  for (auto _ : state) {
    auto runs = run_aqst_trials(worst_state(), kModel, cfg, options, plan);
    benchmark::DoNotOptimize(runs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(1) * cfg.n_total);
  state.SetLabel(exec == Execution::serial ? "serial" : "openmp");
}

void BM_BinomialSampler(benchmark::State& state) {
  const auto exec = state.range(0) == 0 ? Execution::serial : Execution::parallel;
  ProtocolConfig cfg;
  cfg.n_total = 30000;
  cfg.sampler = ShotSampler::binomial;
  const TrialPlan plan{7, "bench/binomial", std::size_t(state.range(1)), exec};
  for (auto _ : state) {
    auto runs = run_standard_trials(worst_state(), kModel, cfg, plan);
    benchmark::DoNotOptimize(runs.data());
  }
  state.SetLabel(exec == Execution::serial ? "serial" : "openmp");
}

void BM_Sweep(benchmark::State& state) {
  const auto exec = state.range(0) == 0 ? Execution::serial : Execution::parallel;
  const SweepGrid grid{-1.5, 1.5, int(state.range(1))};
  for (auto _ : state) {
    auto rows = sweep(kModel, grid, exec);
    benchmark::DoNotOptimize(rows.data());
  }
  state.SetLabel(exec == Execution::serial ? "serial" : "openmp");
}

}  // namespace

BENCHMARK(BM_StandardTrials)->ArgsProduct({{0, 1}, {64}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AqstTrials)->ArgsProduct({{0, 1}, {64}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BinomialSampler)->ArgsProduct({{0, 1}, {4096}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->ArgsProduct({{0, 1}, {60001}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

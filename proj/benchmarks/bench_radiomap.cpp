#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "radiomap/apsm.hpp"
#include "radiomap/eval.hpp"
#include "radiomap/multikernel.hpp"
#include "radiomap/simulator.hpp"

using namespace radiomap;

namespace {

ScenarioConfig bench_scenario() {
  ScenarioConfig cfg;
  cfg.area = {0.0, 0.0, 1000.0, 1000.0};
  cfg.stations = {
      {{200.0, 250.0}, 40.0, 3.0, 10.0},
      {{800.0, 300.0}, 40.0, 3.5, 10.0},
      {{450.0, 800.0}, 45.0, 3.2, 10.0},
  };
  cfg.shadow_sigma_db = 6.0;
  cfg.shadow_decorrelation_m = 200.0;
  cfg.shadow_grid_n = 17;  // keep construction cheap for benchmarks
  cfg.meas_noise_sigma_db = 1.0;
  cfg.pos_noise_sigma_m = 2.0;
  cfg.mobility = {20.0, 45.0, 0, 1.0};
  cfg.seed = 7;
  return cfg;
}

std::vector<Measurement> bench_stream(std::size_t n) {
  const ScenarioConfig cfg = bench_scenario();
  const GroundTruthMap map(cfg);
  return gen_measurements(map, gen_trajectory(cfg, n));
}

}  // namespace

static void BM_EvalKernel(benchmark::State& state) {
  const KernelSpec spec{KernelFamily::kGaussian, 100.0};
  const Position a{12.0, 500.0};
  const Position b{640.0, 128.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_kernel(spec, a, b));
  }
}
BENCHMARK(BM_EvalKernel);

static void BM_GramMatrix(benchmark::State& state) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::vector<Position> positions;
  for (int i = 0; i < state.range(0); ++i) positions.push_back({u(rng), u(rng)});
  const KernelSpec spec{KernelFamily::kGaussian, 100.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(gram_matrix(spec, positions));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GramMatrix)->RangeMultiplier(2)->Range(16, 256)->Complexity();

static void BM_KernelMatrixAt(benchmark::State& state) {
  const KernelBank bank = KernelBank::geometric(KernelFamily::kGaussian, 50.0, 3);
  Dictionary dict;
  dict.config = {1024, 0.99, bank.median_bandwidth_kernel()};
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int i = 0; i < state.range(0); ++i) {
    dict.entries.push_back({{u(rng), u(rng)}, 60.0, i + 1});
  }
  const Position x{500.0, 500.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel_matrix_at(bank, dict, x));
  }
}
BENCHMARK(BM_KernelMatrixAt)->RangeMultiplier(4)->Range(16, 256);

static void BM_ApsmIngest(benchmark::State& state) {
  const auto stream = bench_stream(2000);
  const KernelSpec kernel{KernelFamily::kGaussian, 100.0};
  ApsmConfig cfg;
  ApsmEstimator est(kernel, cfg, {300, 0.86, kernel});
  std::size_t i = 0;
  std::int64_t t = 0;
  for (auto _ : state) {
    Measurement m = stream[i];
    m.time_index = ++t;
    est.ingest(m);
    i = (i + 1) % stream.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ApsmIngest);

static void BM_MultiKernelIngest(benchmark::State& state) {
  const auto stream = bench_stream(2000);
  MkSetup setup;
  setup.bank = KernelBank::geometric(KernelFamily::kGaussian, 50.0, 3);
  setup.dict = {300, 0.86, setup.bank.median_bandwidth_kernel()};
  setup.cfg.update.window_q = static_cast<std::size_t>(state.range(0));
  setup.cfg.update.step_gamma = 1.9;
  MultiKernelEstimator est(setup.bank, setup.cfg, setup.dict);
  std::size_t i = 0;
  std::int64_t t = 0;
  for (auto _ : state) {
    Measurement m = stream[i];
    m.time_index = ++t;
    est.ingest(m);
    i = (i + 1) % stream.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MultiKernelIngest)->Arg(2)->Arg(8)->Arg(16);

static void BM_GridEval(benchmark::State& state) {
  const ScenarioConfig cfg = bench_scenario();
  const GroundTruthMap map(cfg);
  const auto stream = bench_stream(1000);
  MkSetup setup;
  setup.bank = KernelBank::geometric(KernelFamily::kGaussian, 50.0, 3);
  setup.dict = {300, 0.86, setup.bank.median_bandwidth_kernel()};
  MultiKernelEstimator est(setup.bank, setup.cfg, setup.dict);
  for (const auto& m : stream) est.ingest(m);
  const MkMapEstimate snapshot(est.params(), est.dictionary(), est.bank());
  const GridSpec grid{cfg.area, static_cast<std::size_t>(state.range(0)),
                      static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_eval(snapshot, map, grid));
  }
}
BENCHMARK(BM_GridEval)->Arg(25)->Arg(50);

BENCHMARK_MAIN();

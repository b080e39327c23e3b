#include <benchmark/benchmark.h>

#include "factest/bootstrap_test.hpp"
#include "factest/factor_model.hpp"
#include "factest/lasso.hpp"
#include "factest/simulation.hpp"

namespace {

factest::PanelData panel(factest::Index size) {
  auto cfg = factest::SimulationConfig::design(1);
  cfg.periods = size;
  cfg.regressors = size;
  return factest::generate_panel(cfg, 0);
}

void BM_Decompose(benchmark::State& state) {
  const auto data = panel(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(factest::decompose(data, {}));
}
BENCHMARK(BM_Decompose)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_LassoPath(benchmark::State& state) {
  const auto dec = factest::decompose(panel(state.range(0)), {});
  const auto grid = factest::LambdaGrid::equidistant(factest::compute_lambda_bar(dec.u_hat, dec.y_tilde),
                                                     state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(factest::fit_path(dec.u_hat, dec.y_tilde, grid));
}
BENCHMARK(BM_LassoPath)->Args({100, 100})->Args({100, 200})->Args({200, 100})->Unit(benchmark::kMillisecond);

void BM_BootstrapDraws(benchmark::State& state) {
  const auto dec = factest::decompose(panel(100), {});
  const auto grid = factest::LambdaGrid::equidistant(factest::compute_lambda_bar(dec.u_hat, dec.y_tilde), 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        factest::draw_bootstrap(dec.u_hat, dec.y_tilde, grid, state.range(0), 42, 1, factest::LassoOptions{}));
  }
}
BENCHMARK(BM_BootstrapDraws)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_RunTest(benchmark::State& state) {
  const auto data = panel(100);
  factest::TestConfig cfg;
  cfg.grid_size = state.range(0);
  cfg.bootstrap_draws = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(factest::run_test(data, 0.05, cfg));
}
BENCHMARK(BM_RunTest)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

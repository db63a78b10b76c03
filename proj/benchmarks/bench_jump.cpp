#include <benchmark/benchmark.h>

#include <cmath>

#include "opalg/jump.hpp"

using namespace opalg;

static void BM_SeriesPrice(benchmark::State& state) {
  JumpModel model = calibrate_rn({{1, 0.5}, {-1, 0.5}}, 0.1, 0.05);
  Payoff digital = digital_call_payoff(std::exp(0.05));
  double tau = double(state.range(0)) / 10.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(series_price(model, digital, tau, 1.0, 1e-12));
}
BENCHMARK(BM_SeriesPrice)->Arg(1)->Arg(5)->Arg(10);

static void BM_ExpmPrice(benchmark::State& state) {
  JumpModel model = calibrate_rn({{1, 0.5}, {-1, 0.5}}, 0.1, 0.05);
  Payoff digital = digital_call_payoff(std::exp(0.05));
  double tau = double(state.range(0)) / 10.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(expm_price(model, digital, tau, 1.0));
}
BENCHMARK(BM_ExpmPrice)->Arg(1)->Arg(5)->Arg(10);

static void BM_DiffusionLatticeStep(benchmark::State& state) {
  double dx = 1.0 / double(state.range(0));
  Payoff digital = digital_call_payoff(1.0);
  for (auto _ : state) {
    JumpModel model = diffusion_model(0.2, 0.05, dx);
    benchmark::DoNotOptimize(expm_price(model, digital, 1.0, 1.0));
  }
}
BENCHMARK(BM_DiffusionLatticeStep)->Arg(12)->Arg(25)->Unit(benchmark::kMillisecond);

static void BM_ErrorFloorMonteCarlo(benchmark::State& state) {
  JumpModel model = calibrate_rn({{1, 0.5}, {-1, 0.5}}, 0.1, 0.05);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        simulate_increments(model, 1.0, state.range(0), 11));
}
BENCHMARK(BM_ErrorFloorMonteCarlo)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

#include <benchmark/benchmark.h>

#include "opalg/arbitrage.hpp"
#include "opalg/demo_models.hpp"

using namespace opalg;

static void BM_CondExpApply(benchmark::State& state) {
  DemoMarket market = demo_two_block_market();
  ConditionalExpectation ce = ConditionalExpectation::make(
      market.model.filtration.partitions[1], market.state);
  Rng rng(5);
  Matrix x = random_hermitian(4, rng);
  for (auto _ : state) benchmark::DoNotOptimize(ce(x));
}
BENCHMARK(BM_CondExpApply);

static void BM_PricingOperator(benchmark::State& state) {
  DemoMarket market = demo_two_block_market();
  PricingSystem ps = PricingSystem::make(market.model, market.state);
  Rng rng(6);
  Matrix x = random_hermitian(4, rng);
  for (auto _ : state) benchmark::DoNotOptimize(pricing_operator(ps, x, 0));
}
BENCHMARK(BM_PricingOperator);

static void BM_PricingChoi(benchmark::State& state) {
  DemoMarket market = demo_two_block_market();
  PricingSystem ps = PricingSystem::make(market.model, market.state);
  Rng rng(7);
  for (auto _ : state) {
    Rng local = rng;
    benchmark::DoNotOptimize(verify_pricing_properties(ps, 0, 5, local));
  }
}
BENCHMARK(BM_PricingChoi);

static void BM_DykstraSolve(benchmark::State& state) {
  Rng rng(8);
  Matrix g1 = random_hermitian(int(state.range(0)), rng);
  g1 -= (g1.trace().real() / double(state.range(0)) + 0.3) *
        Matrix::Identity(state.range(0), state.range(0));
  GainsCone cone = make_cone({g1});
  SolverOptions opts;
  opts.delta = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(find_pricing_state(cone, opts));
}
BENCHMARK(BM_DykstraSolve)->Arg(2)->Arg(4)->Arg(8);

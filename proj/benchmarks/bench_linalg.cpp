#include <benchmark/benchmark.h>

#include "opalg/linalg.hpp"
#include "opalg/random.hpp"

using namespace opalg;

static void BM_EigHermitian(benchmark::State& state) {
  Rng rng(1);
  Matrix a = random_hermitian(int(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(eig_hermitian(a));
}
BENCHMARK(BM_EigHermitian)->Arg(8)->Arg(32)->Arg(64);

static void BM_MatExp(benchmark::State& state) {
  Rng rng(2);
  Matrix a = random_matrix(int(state.range(0)), rng);
  MatExpOptions opts;
  opts.check_residual = false;
  for (auto _ : state) benchmark::DoNotOptimize(mat_exp(a, opts));
}
BENCHMARK(BM_MatExp)->Arg(8)->Arg(32)->Arg(64);

static void BM_FuncCalcSqrt(benchmark::State& state) {
  Rng rng(3);
  Matrix a = random_psd(int(state.range(0)), rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(func_calc(a, [](double x) { return std::sqrt(x); }));
}
BENCHMARK(BM_FuncCalcSqrt)->Arg(8)->Arg(32);

static void BM_ChoiMatrix(benchmark::State& state) {
  Rng rng(4);
  Matrix v = random_matrix(int(state.range(0)), rng);
  LinearMap map = [&](const Matrix& x) { return Matrix(v.adjoint() * x * v); };
  for (auto _ : state)
    benchmark::DoNotOptimize(choi_matrix(map, int(state.range(0))));
}
BENCHMARK(BM_ChoiMatrix)->Arg(4)->Arg(8);

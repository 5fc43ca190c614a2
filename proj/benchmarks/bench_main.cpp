#include <benchmark/benchmark.h>

#include "bellcert/estimates.hpp"
#include "bellcert/verify.hpp"

using namespace bellcert;

namespace {

BellmanPoint sample_point(double q) {
  return sample_domain(QContext::make(q), 1, 11).front();
}

void BM_EvalBq(benchmark::State& state) {
  const QContext ctx = QContext::make(10.0);
  const auto pts = sample_domain(ctx, 1024, 3);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_bq(pts[i++ & 1023], ctx));
  }
}
BENCHMARK(BM_EvalBq);

void BM_FdHessian(benchmark::State& state) {
  const QContext ctx = QContext::make(10.0, static_cast<int>(state.range(0)));
  const BellmanPoint p = sample_domain(ctx, 1, 5).front();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fd_hessian(p, ctx, 1e-4));
  }
}
BENCHMARK(BM_FdHessian)->Arg(1)->Arg(3);

void BM_VerifyPoint(benchmark::State& state) {
  const QContext ctx = QContext::make(2.0);
  SuiteConfig cfg;
  cfg.q_list = {2.0};
  const auto dirs = hessian_directions(6, cfg.directions_per_point, cfg.seed);
  const BellmanPoint p = sample_point(2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_point(p, ctx, cfg, dirs));
  }
}
BENCHMARK(BM_VerifyPoint);

void BM_PoissonWeight(benchmark::State& state) {
  const auto w = gauss::WeightSpec::exp_linear(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gauss::poisson_weight(w, 0.5, 0.3));
  }
}
BENCHMARK(BM_PoissonWeight);

void BM_Q2Standard(benchmark::State& state) {
  const auto w = gauss::WeightSpec::exp_linear(1.0);
  const auto grid = gauss::FlowGrid::standard();
  for (auto _ : state) {
    benchmark::DoNotOptimize(gauss::q2_characteristic(w, grid));
  }
}
BENCHMARK(BM_Q2Standard)->Unit(benchmark::kMillisecond);

void BM_RieszNorm(benchmark::State& state) {
  const auto w = gauss::WeightSpec::exp_linear(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gauss::riesz_subspace_norm(w, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_RieszNorm)->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "gforge/md_noise.hpp"
#include "gforge/planewave.hpp"

using namespace gforge;

static WaterSystem waters(int n) {
  MDConfig c;
  c.n_waters = n;
  return make_lattice(c);
}

static void BM_ForcesParallel(benchmark::State& st) {
  WaterSystem s = waters(int(st.range(0)));
  MDConfig c;
  c.n_waters = s.n;
  const double rc = c.resolved_cutoff();
  for (auto _ : st) benchmark::DoNotOptimize(forces_parallel(s, rc));
}
BENCHMARK(BM_ForcesParallel)->Arg(64)->Arg(216)->Unit(benchmark::kMicrosecond);

static void BM_ForcesSerial(benchmark::State& st) {
  WaterSystem s = waters(int(st.range(0)));
  MDConfig c;
  c.n_waters = s.n;
  const double rc = c.resolved_cutoff();
  for (auto _ : st) benchmark::DoNotOptimize(forces_serial(s, rc));
}
BENCHMARK(BM_ForcesSerial)->Arg(64)->Arg(216)->Unit(benchmark::kMicrosecond);

static void BM_PwLambdaParallel(benchmark::State& st) {
  const PWGrid g{int(st.range(0)), 1000.0};
  const Eigen::Vector3d d(1.0, 0.3, -0.2);
  for (auto _ : st) benchmark::DoNotOptimize(pw_lambda_force(g, 1.0, 1, d));
}
BENCHMARK(BM_PwLambdaParallel)->Arg(31)->Arg(63)->Unit(benchmark::kMillisecond);

static void BM_PwLambdaSerial(benchmark::State& st) {
  const PWGrid g{int(st.range(0)), 1000.0};
  const Eigen::Vector3d d(1.0, 0.3, -0.2);
  for (auto _ : st) benchmark::DoNotOptimize(pw_lambda_force_serial(g, 1.0, 1, d));
}
BENCHMARK(BM_PwLambdaSerial)->Arg(31)->Arg(63)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

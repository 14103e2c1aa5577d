#include <benchmark/benchmark.h>

#include <random>

#include "contestlab/equilibrium.hpp"
#include "contestlab/regress.hpp"
#include "contestlab/simulate.hpp"

using namespace contestlab;

namespace {

ContestConfig bench_config() {
  ContestConfig cfg;
  cfg.n = 100;
  cfg.l = 30;
  cfg.h = 10;
  cfg.b_l = 0.2;
  cfg.b_h = 0.8;
  cfg.prize = 5000.0;
  cfg.cost_sabotage = 0.05;
  cfg.cost_promotion = 0.01;
  return cfg;
}

void BM_classify(benchmark::State& state) {
  ContestConfig cfg = bench_config();
  for (auto _ : state) benchmark::DoNotOptimize(classify(cfg));
}
BENCHMARK(BM_classify);

void BM_verify_nash(benchmark::State& state) {
  ContestConfig cfg = bench_config();
  StrategyProfile p = canonical_profile(NashId::NE4, cfg);
  for (auto _ : state)
    benchmark::DoNotOptimize(verify_nash(cfg, p, 0.07, 0.01));
}
BENCHMARK(BM_verify_nash);

void BM_sweep(benchmark::State& state) {
  ContestConfig cfg = bench_config();
  std::vector<double> grid = default_cs_grid(cfg.prize, int(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(sweep_costs(cfg, grid, 0.01));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_sweep)->Arg(100)->Arg(1000);

void BM_simulate(benchmark::State& state) {
  SimConfig cfg;
  cfg.weeks = int(state.range(0));
  cfg.population = 400;
  cfg.seed = 7;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg));
}
BENCHMARK(BM_simulate)->Arg(10)->Arg(50);

void BM_demean(benchmark::State& state) {
  const std::size_t n = std::size_t(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<std::int32_t> f1(0, 199), f2(0, 499);
  std::vector<double> base(n);
  std::vector<std::int32_t> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    base[i] = g(rng);
    a[i] = f1(rng);
    b[i] = f2(rng);
  }
  for (auto _ : state) {
    std::vector<double> col = base;
    std::vector<std::vector<double>*> cols{&col};
    benchmark::DoNotOptimize(demean_two_way(cols, a, b));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_demean)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();

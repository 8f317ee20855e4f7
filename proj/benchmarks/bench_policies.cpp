#include <benchmark/benchmark.h>

#include "rbon/cost.hpp"
#include "rbon/eval.hpp"
#include "rbon/policies.hpp"
#include "rbon/reference.hpp"

namespace {

rbon::Dataset pools(std::size_t n_pools, std::size_t n_candidates) {
  rbon::SynthParams p;
  p.n_pools = n_pools;
  p.n_candidates = n_candidates;
  p.embed_dim = 32;
  p.seed = 42;
  return rbon::synth_pools(p);
}

void BM_CostMatrix(benchmark::State& state) {
  const auto ds = pools(1, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rbon::cost_matrix(ds.pools[0]));
}
BENCHMARK(BM_CostMatrix)->RangeMultiplier(2)->Range(8, 128);

void BM_SelectRbonWd(benchmark::State& state) {
  const auto ds = pools(1, static_cast<std::size_t>(state.range(0)));
  const auto c = rbon::cost_matrix(ds.pools[0]);
  for (auto _ : state) benchmark::DoNotOptimize(rbon::select_rbon_wd(ds.pools[0], c, "proxy", 0.5));
}
BENCHMARK(BM_SelectRbonWd)->RangeMultiplier(2)->Range(8, 128);

void BM_SrbonKlPolicy(benchmark::State& state) {
  const auto ds = pools(1, static_cast<std::size_t>(state.range(0)));
  const auto ref = rbon::model_reference(ds.pools[0]);
  for (auto _ : state) benchmark::DoNotOptimize(rbon::srbon_kl_policy(ds.pools[0], ref, "proxy", 0.5));
}
BENCHMARK(BM_SrbonKlPolicy)->RangeMultiplier(2)->Range(8, 128);

void BM_SrbonWdPolicy(benchmark::State& state) {
  const auto ds = pools(1, static_cast<std::size_t>(state.range(0)));
  const auto c = rbon::cost_matrix(ds.pools[0]);
  const auto ref = rbon::empirical_reference(ds.pools[0]);
  for (auto _ : state) benchmark::DoNotOptimize(rbon::srbon_wd_policy(ds.pools[0], ref, c, "proxy", 0.5));
}
BENCHMARK(BM_SrbonWdPolicy)->RangeMultiplier(2)->Range(8, 128);

void BM_BetaSweep(benchmark::State& state) {
  const auto ds = pools(static_cast<std::size_t>(state.range(0)), 32);
  const auto grid = rbon::beta_grid();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rbon::beta_sweep(ds, rbon::Method::kRbonWd, "proxy", "gold", grid, 0));
  }
}
BENCHMARK(BM_BetaSweep)->Arg(16)->Arg(64);

}  // namespace

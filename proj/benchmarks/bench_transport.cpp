#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "rbon/cost.hpp"
#include "rbon/random.hpp"
#include "rbon/transport.hpp"

namespace {

struct Instance {
  rbon::Policy nu;
  rbon::Policy mu;
  rbon::CostMatrix cost;
};

rbon::Policy simplex(rbon::Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) {
    x = -std::log1p(-rng.uniform()) + 1e-12;
    total += x;
  }
  for (double& x : w) x /= total;
  return rbon::Policy(std::move(w));
}

Instance make_instance(std::size_t n, std::size_t dim) {
  rbon::Rng rng(n * 7919 + dim);
  std::vector<std::vector<double>> e(n, std::vector<double>(dim));
  for (auto& v : e) {
    for (double& x : v) x = rng.normal();
  }
  std::vector<double> c(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) c[i * n + j] = c[j * n + i] = rbon::cosine_cost(e[i], e[j]);
  }
  return {simplex(rng, n), simplex(rng, n), rbon::CostMatrix(n, std::move(c))};
}

void BM_WdPrimal(benchmark::State& state) {
  const auto inst = make_instance(static_cast<std::size_t>(state.range(0)), 16);
  for (auto _ : state) benchmark::DoNotOptimize(rbon::wd_primal(inst.nu, inst.mu, inst.cost).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WdPrimal)->RangeMultiplier(2)->Range(8, 256)->Complexity();

void BM_WdDual(benchmark::State& state) {
  const auto inst = make_instance(static_cast<std::size_t>(state.range(0)), 16);
  for (auto _ : state) benchmark::DoNotOptimize(rbon::wd_dual(inst.nu, inst.mu, inst.cost).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WdDual)->RangeMultiplier(2)->Range(8, 256)->Complexity();

void BM_MetricClosure(benchmark::State& state) {
  const auto inst = make_instance(static_cast<std::size_t>(state.range(0)), 16);
  for (auto _ : state) benchmark::DoNotOptimize(rbon::metric_closure(inst.cost));
}
BENCHMARK(BM_MetricClosure)->RangeMultiplier(2)->Range(8, 256);

}  // namespace

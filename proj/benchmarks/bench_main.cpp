#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sublin/axioms.hpp"
#include "sublin/functionals.hpp"
#include "sublin/g_function.hpp"
#include "sublin/gheat.hpp"
#include "sublin/lattice_dp.hpp"
#include "sublin/scenario_tree.hpp"
#include "sublin/tree_stats.hpp"

using namespace sublin;

static void BM_IidSumExpect(benchmark::State& state) {
  const auto x = symmetric_three_point({0.5, 1.0});
  const auto phi = lab::functional("pos").fn;
  const auto n = static_cast<std::size_t>(state.range(0));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto _ : state) benchmark::DoNotOptimize(iid_sum_expect(x, n, phi, scale));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_IidSumExpect)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void BM_RunningMax(benchmark::State& state) {
  const auto x = symmetric_three_point({0.5, 1.0});
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(running_max_expect(x, n, 1.0 / std::sqrt(double(n))));
}
BENCHMARK(BM_RunningMax)->Arg(16)->Arg(64);

static void BM_GHeat1d(benchmark::State& state) {
  const GFunction g = g_from_interval({0.5, 1.0});
  pde::SolveHints h;
  h.spacing = 0.05 * 4.0 / static_cast<double>(state.range(0));
  const auto phi = lab::functional("pos").fn;
  for (auto _ : state) benchmark::DoNotOptimize(pde::gnormal_expect(g, phi, h).value);
}
BENCHMARK(BM_GHeat1d)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_GHeat2d(benchmark::State& state) {
  const GFunction g({diag({1.0, 0.5}), diag({0.5, 1.0})});
  pde::SolveHints h;
  h.spacing = 0.2 / static_cast<double>(state.range(0));
  const auto phi = TestFunction::of_point(2, [](std::span<const double> p) { return std::max(p[0] + p[1], 0.0); });
  for (auto _ : state) benchmark::DoNotOptimize(pde::gnormal_expect(g, phi, h).value);
}
BENCHMARK(BM_GHeat2d)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_TreeCondExpect(benchmark::State& state) {
  std::mt19937_64 rng(1);
  tree::TreeGenOptions o;
  o.max_levels = static_cast<std::size_t>(state.range(0));
  auto t = tree::random_tree(rng, o);
  while (t.depth() < o.max_levels) t = tree::random_tree(rng, o);
  const auto vars = tree::random_variables(t, 1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(tree::expect(t, vars[0]));
  state.counters["nodes"] = static_cast<double>(t.node_count());
}
BENCHMARK(BM_TreeCondExpect)->DenseRange(2, 6, 2);

static void BM_AxiomSuite(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_axiom_suite(1, 100, 10).worst());
}
BENCHMARK(BM_AxiomSuite)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

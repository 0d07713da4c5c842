#include <random>

#include <benchmark/benchmark.h>

#include "pcorder/analysis.hpp"
#include "pcorder/detectors.hpp"
#include "pcorder/ordering.hpp"

using namespace pcorder;

namespace {

Dataset synthetic(std::size_t rows, std::size_t dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 1);
  std::vector<Dataset::NamedSeries> s;
  std::vector<double> base(rows);
  for (double& v : base) v = g(rng);
  for (std::size_t d = 0; d < dims; ++d) {
    std::vector<double> v(rows);
    for (std::size_t r = 0; r < rows; ++r) v[r] = base[r] * (d % 2 ? -1.0 : 1.0) + 0.5 * g(rng);
    s.push_back({"c" + std::to_string(d), std::move(v)});
  }
  return Dataset::from_columns("bench", std::move(s));
}

ScoreMatrix random_matrix(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> values(d * d);
  for (double& v : values) v = u(rng);
  return ScoreMatrix::from_values(d, values);
}

}  // namespace

static void BM_ClearGrouping(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(state.range(0)), y(state.range(0));
  for (auto& v : x) v = u(rng);
  for (auto& v : y) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(detect::clear_grouping(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ClearGrouping)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

static void BM_Analysis(benchmark::State& state) {
  const auto ds = synthetic(static_cast<std::size_t>(state.range(0)), 6, 7);
  for (auto _ : state) {
    auto a = Analysis::compute(ds, WindowSpec{0.2, 0.1}, {.seed = 1});
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_Analysis)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_WeightChange(benchmark::State& state) {
  const auto a = Analysis::compute(synthetic(2000, 6, 7), WindowSpec{0.2, 0.1}, {.seed = 1});
  const auto w = Weights::parse("pos_corr=1,clear_grouping=0.5,fan=0.2");
  for (auto _ : state) benchmark::DoNotOptimize(build_matrix(a, w));
}
BENCHMARK(BM_WeightChange)->Unit(benchmark::kMicrosecond);

static void BM_OrderTsp(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(order_tsp(m));
}
BENCHMARK(BM_OrderTsp)->DenseRange(6, 14, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <random>

#include "leadrisk/forest.h"
#include "leadrisk/gbt.h"
#include "leadrisk/knn.h"
#include "leadrisk/metrics.h"
#include "leadrisk/synth.h"

namespace {

using namespace leadrisk;

struct Data {
  Matrix x;
  std::vector<int> y;
};

Data Make(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Data d{Matrix(rows, cols), std::vector<int>(rows)};
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) d.x(i, j) = n(rng);
    d.y[i] = d.x(i, 0) + 0.5 * n(rng) > 1.0 ? 1 : 0;
  }
  return d;
}

void BM_Auc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const CalibratedSample s = SampleCalibrated(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(Auc(s.probability, s.labels));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Auc)->Range(1 << 10, 1 << 18);

void BM_GbtFit(benchmark::State& state) {
  const Data d = Make(static_cast<std::size_t>(state.range(0)), 20, 2);
  GbtParams p;
  p.trees = 20;
  p.max_depth = 5;
  for (auto _ : state) benchmark::DoNotOptimize(FitGbt(d.x, d.y, p));
}
BENCHMARK(BM_GbtFit)->Arg(1000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_ForestFit(benchmark::State& state) {
  const Data d = Make(4000, 20, 3);
  ForestParams p;
  p.variant = static_cast<ForestVariant>(state.range(0));
  p.trees = 20;
  for (auto _ : state) benchmark::DoNotOptimize(FitForest(d.x, d.y, p, 3));
}
BENCHMARK(BM_ForestFit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_KnnPredict(benchmark::State& state) {
  Data d = Make(static_cast<std::size_t>(state.range(0)), 40, 4);
  const Matrix query = d.x;
  const KnnModel m = FitKnn(std::move(d.x), std::move(d.y), 100);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.predict(query.row(i)));
    i = (i + 1) % query.rows();
  }
}
BENCHMARK(BM_KnnPredict)->Arg(2000)->Arg(8000);

}  // namespace

BENCHMARK_MAIN();

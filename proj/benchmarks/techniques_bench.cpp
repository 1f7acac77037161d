#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "spcc/control_techniques.hpp"

namespace {

using namespace spcc;

std::vector<MeasurementPoint> synthetic_points(int n) {
  static const char* steps[] = {"/a/x/1", "/a/x/2", "/a/y/1", "/b/x/1", "/b/y/2", "/c/z/3"};
  std::vector<MeasurementPoint> points;
  points.reserve(n);
  for (int i = 0; i < n; ++i) {
    points.push_back({i, steps[i % 6], "s" + std::to_string(i % 5), 0.25 * (i % 13), "h", "bench"});
  }
  return points;
}

void BM_Aggregate(benchmark::State& state) {
  const auto points = synthetic_points(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(aggregate(points, {2, "/"}, Reducer::kSum, true));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Aggregate)->Arg(1000)->Arg(100000);

void BM_PredictCourse(benchmark::State& state) {
  std::vector<TimedValue> series;
  for (int i = 0; i < state.range(0); ++i) series.push_back({static_cast<double>(i), 1.5 * i + 2.0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_course(series, 10, ForecastModel::kLinearLeastSquares));
  }
}
BENCHMARK(BM_PredictCourse)->Arg(100)->Arg(10000);

void BM_ClassifyDeviation(benchmark::State& state) {
  const ToleranceSpec tol{ToleranceMode::kRelative, 0.1, 0.2};
  double d = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify_deviation(d, tol));
    d += 0.001;
    if (d > 0.5) d = 0.0;
  }
}
BENCHMARK(BM_ClassifyDeviation);

}  // namespace

#include <benchmark/benchmark.h>

#include <memory>

#include "bench_data.hpp"
#include "spcc/engine.hpp"
#include "spcc/service.hpp"
#include "spcc/technique_registry.hpp"

namespace {

using namespace spcc;

std::shared_ptr<const DataSnapshot> loaded_snapshot(ControlCenter& center) {
  center.register_project(bench::case_study());
  for (int g = 1; g <= 3; ++g) {
    center.ingest("ukl_course", "g" + std::to_string(g) + "-tracker", bench::case_study_csv(g), RecordFormat::kCsv);
  }
  return center.snapshot("ukl_course");
}

void BM_ExecuteCaseStudyCatena(benchmark::State& state) {
  ControlCenter center;
  const auto snap = loaded_snapshot(center);
  const auto vc = center.catena("ukl_course");
  auto registry = std::make_shared<const TechniqueRegistry>(TechniqueRegistry::with_builtins());
  for (auto _ : state) {
    benchmark::DoNotOptimize(execute_catena(vc, snap, registry));
  }
}
BENCHMARK(BM_ExecuteCaseStudyCatena)->Unit(benchmark::kMicrosecond);

void BM_DrillDown(benchmark::State& state) {
  ControlCenter center;
  loaded_snapshot(center);
  const auto result = center.evaluate_latest("ukl_course");
  for (auto _ : state) {
    benchmark::DoNotOptimize(drill_down(*result, "pm_effort", "/implementation"));
  }
}
BENCHMARK(BM_DrillDown)->Unit(benchmark::kMicrosecond);

void BM_EndToEndCaseStudy(benchmark::State& state) {
  for (auto _ : state) {
    ControlCenter center;
    loaded_snapshot(center);
    benchmark::DoNotOptimize(center.evaluate_latest("ukl_course"));
  }
}
BENCHMARK(BM_EndToEndCaseStudy)->Unit(benchmark::kMillisecond);

}  // namespace

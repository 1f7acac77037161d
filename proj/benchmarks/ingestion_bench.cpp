#include <benchmark/benchmark.h>

#include <memory>
#include <string>

#include "bench_data.hpp"
#include "spcc/ingestion.hpp"

namespace {

using namespace spcc;

void BM_ParseCsv(benchmark::State& state) {
  const auto csv = bench::synthetic_csv(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_records(csv, RecordFormat::kCsv, "bench"));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ParseCsv)->Arg(100)->Arg(10000);

void BM_IngestBatch(benchmark::State& state) {
  const auto reg = bench::case_study();
  const auto plan = std::make_shared<const GqmPlan>(reg.plan);
  const auto csv = bench::synthetic_csv(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    MeasurementStore store("ukl_course", plan, reg.baselines, reg.sources);
    benchmark::DoNotOptimize(store.ingest("g1-tracker", csv, RecordFormat::kCsv));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IngestBatch)->Arg(100)->Arg(10000)->Unit(benchmark::kMicrosecond);

}  // namespace

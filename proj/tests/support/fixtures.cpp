#include "fixtures.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "spcc/ingestion.hpp"

namespace spcc::fixtures {

namespace fs = std::filesystem;

std::shared_ptr<const TechniqueRegistry> builtins() {
  static const auto registry = std::make_shared<const TechniqueRegistry>(TechniqueRegistry::with_builtins());
  return registry;
}

nlohmann::json small_plan_json() {
  return nlohmann::json::parse(R"({
    "goals": [
      {"id": "G1", "object": "the project effort", "purpose": "baseline checking",
       "viewpoint": "project manager", "context": "a practical course at UKL"},
      {"id": "G2", "object": "the found defects", "purpose": "defect tracking",
       "viewpoint": "QA manager", "context": "a practical course at UKL"}
    ],
    "metrics": [
      {"id": "effort", "name": "Effort", "unit": "h", "min": 0, "max": 24, "goals": ["G1"],
       "collected_at": ["/design/ui", "/design/db", "/impl/code", "/impl/review"],
       "collector_role": "developer"},
      {"id": "defects", "name": "Defects", "unit": "count", "min": 0, "max": 50, "goals": ["G2"],
       "collected_at": ["/impl/code", "/impl/review"], "collector_role": "qa_manager"}
    ],
    "process_steps": ["/design/ui", "/design/db", "/impl/code", "/impl/review"]
  })");
}

GqmPlan small_plan() { return plan_from_json(small_plan_json()); }

MeasurementPoint point(Timestamp t, std::string step, std::string subject, double value, std::string unit,
                       std::string source) {
  return MeasurementPoint{t, std::move(step), std::move(subject), value, std::move(unit), std::move(source)};
}

std::shared_ptr<const DataSnapshot> snapshot_of(std::map<std::string, std::vector<MeasurementPoint>> series,
                                                const StepTree& steps, BaselineSet baselines,
                                                std::uint64_t version) {
  auto snap = std::make_shared<DataSnapshot>();
  snap->version = version;
  snap->steps = steps;
  snap->baselines = std::move(baselines);
  for (auto& [metric, points] : series) {
    DataEntry entry;
    entry.metric_id = metric;
    entry.unit = points.empty() ? std::string() : points.front().unit;
    for (const auto& p : points) snap->as_of = std::max(snap->as_of, p.timestamp);
    entry.series = std::move(points);
    snap->entries.emplace(metric, std::move(entry));
  }
  return snap;
}

Baseline baseline(std::string metric, std::string unit, std::vector<BaselinePoint> points) {
  Baseline b;
  b.baseline_id = metric;
  b.metric_id = std::move(metric);
  b.unit = std::move(unit);
  b.points = std::move(points);
  return b;
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  std::ostringstream name;
  name << "spcc-test-" << rd() << "-" << counter++;
  path_ = (fs::temp_directory_path() / name.str()).string();
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string case_study_dir() { return SPCC_CASE_STUDY_DIR; }

nlohmann::json case_study_bundle() { return load_bundle_dir(case_study_dir()); }

std::string case_study_measurements(int group) {
  return read_file(case_study_dir() + "/measurements_g" + std::to_string(group) + ".csv");
}

void load_case_study(ControlCenter& center) {
  const auto bundle = case_study_bundle();
  center.register_project(registration_from_json("ukl_course", bundle), &bundle);
  for (int g = 1; g <= 3; ++g) {
    center.ingest("ukl_course", "g" + std::to_string(g) + "-tracker", case_study_measurements(g), RecordFormat::kCsv);
  }
}

}  // namespace spcc::fixtures

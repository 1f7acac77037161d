#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spcc/catena.hpp"
#include "spcc/engine.hpp"
#include "spcc/gqm_plan.hpp"
#include "spcc/measurement.hpp"
#include "spcc/service.hpp"
#include "spcc/technique_registry.hpp"

namespace spcc::fixtures {

// Shared registry with the five built-in techniques.
std::shared_ptr<const TechniqueRegistry> builtins();

// Plan with effort (h, 0..24) and defects (count, 0..50) over the steps
// /design/ui, /design/db, /impl/code and /impl/review.
nlohmann::json small_plan_json();
GqmPlan small_plan();

MeasurementPoint point(Timestamp t, std::string step, std::string subject, double value,
                       std::string unit = "h", std::string source = "src");

// Snapshot with the plan's step tree and one entry per metric.
std::shared_ptr<const DataSnapshot> snapshot_of(std::map<std::string, std::vector<MeasurementPoint>> series,
                                                const StepTree& steps, BaselineSet baselines = {},
                                                std::uint64_t version = 1);

Baseline baseline(std::string metric, std::string unit, std::vector<BaselinePoint> points);

// Fresh directory below the system temp dir, removed by the destructor.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// The shipped course example.
std::string case_study_dir();
nlohmann::json case_study_bundle();
std::string case_study_measurements(int group);  // 1..3
// Registers the course bundle and ingests the three groups' files.
void load_case_study(ControlCenter& center);

}  // namespace spcc::fixtures

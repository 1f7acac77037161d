#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "spcc/step_path.hpp"
#include "spcc/timestamp.hpp"

namespace spcc {

// One accepted data point.
struct MeasurementPoint {
  Timestamp timestamp = 0;
  std::string step_path;
  std::string subject_id;
  double value = 0.0;
  std::string unit;
  std::string source_id;

  bool operator==(const MeasurementPoint&) const = default;
};

// Strict weak order used for deterministic series ordering.
bool point_less(const MeasurementPoint& a, const MeasurementPoint& b);

// Time-ordered series of one metric. All points share `unit`.
struct DataEntry {
  std::string metric_id;
  std::string unit;
  std::vector<MeasurementPoint> series;

  bool operator==(const DataEntry&) const = default;
};

enum class BaselineSource { kPlanned, kPreviousProject };

struct BaselinePoint {
  std::string step_path;
  double planned = 0.0;  // cumulative planned value at the step

  bool operator==(const BaselinePoint&) const = default;
};

struct Baseline {
  std::string baseline_id;
  std::string metric_id;
  std::string unit;
  BaselineSource source = BaselineSource::kPlanned;
  std::vector<BaselinePoint> points;

  const BaselinePoint* find(std::string_view step_path) const;
  bool operator==(const Baseline&) const = default;
};

using BaselineSet = std::map<std::string, Baseline, std::less<>>;

// Reads `metric,process_step,planned,unit` CSV. One baseline per metric;
// the baseline id equals the metric id. Throws ParseError.
BaselineSet parse_baselines_csv(std::string_view text);
std::string write_baselines_csv(const BaselineSet& baselines);

// Immutable committed dataset of a project. `as_of` is the latest
// measurement time in the snapshot (0 when empty) and doubles as the
// evaluation timestamp of results computed from it.
struct DataSnapshot {
  std::uint64_t version = 0;
  Timestamp as_of = 0;
  StepTree steps;
  BaselineSet baselines;
  std::map<std::string, DataEntry, std::less<>> entries;  // keyed by metric id

  const DataEntry* entry(std::string_view metric_id) const;
  std::size_t point_count() const;

  // Copy holding only the points accepted by `keep`; empty entries are dropped.
  DataSnapshot filtered(const std::function<bool(const MeasurementPoint&)>& keep) const;
};

}  // namespace spcc

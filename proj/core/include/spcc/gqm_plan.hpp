#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "spcc/step_path.hpp"

namespace spcc {

struct VisualizationCatena;
class RoleTable;

struct MeasurementGoal {
  std::string goal_id;
  std::string object;
  std::string purpose;
  std::string viewpoint;
  std::string context;
  std::optional<std::string> quality_focus;

  // "Analyze {object} for the purpose of {purpose} from the viewpoint of the
  // {viewpoint} in the context of {context}". A quality focus, when present,
  // is rendered as " with respect to {focus}" after the purpose.
  std::string render() const;

  bool operator==(const MeasurementGoal&) const = default;
};

// Throws EmptyField when object, purpose, viewpoint or context is empty.
MeasurementGoal formulate_goal(std::string object, std::string purpose, std::string viewpoint,
                               std::string context,
                               std::optional<std::string> quality_focus = std::nullopt,
                               std::string goal_id = {});

// Inverse of MeasurementGoal::render(). The goal id is left empty.
std::optional<MeasurementGoal> parse_goal_sentence(std::string_view sentence);

enum class MetricScale { kRatio, kInterval, kOrdinal };
enum class CollectionFrequency { kPerEvent, kDaily, kPerPhase };

std::string_view to_string(MetricScale scale);
std::string_view to_string(CollectionFrequency frequency);

struct Metric {
  std::string metric_id;
  std::string name;
  std::string unit;
  double min = 0.0;  // plausibility range, inclusive
  double max = 0.0;
  MetricScale scale = MetricScale::kRatio;
  std::vector<std::string> goal_ids;
  std::vector<std::string> questions;    // free-text GQM questions
  std::vector<std::string> collected_at;  // process steps where it is collected
  std::string collector_role;
  CollectionFrequency frequency = CollectionFrequency::kPerEvent;

  bool operator==(const Metric&) const = default;
};

struct DataCollectionSheet {
  std::string sheet_id;
  std::string step_path;
  std::vector<std::string> metric_ids;
  std::string collector_role;
  CollectionFrequency frequency = CollectionFrequency::kPerEvent;

  bool operator==(const DataCollectionSheet&) const = default;
};

struct GqmPlan {
  std::vector<MeasurementGoal> goals;
  std::vector<Metric> metrics;
  std::vector<DataCollectionSheet> sheets;
  StepTree steps;

  const MeasurementGoal* goal(std::string_view goal_id) const;
  const Metric* metric(std::string_view metric_id) const;

  bool operator==(const GqmPlan&) const = default;
};

// Plan file: keys `goals`, `metrics`, `sheets` (optional), `process_steps`.
// Throws ParseError / EmptyField when a cross-reference or invariant fails.
GqmPlan plan_from_json(const nlohmann::json& doc);
GqmPlan load_plan(std::string_view text);
nlohmann::json to_json(const GqmPlan& plan);

// One sheet per process step carrying every metric collected there, ordered
// by step path; metric ids within a sheet are sorted. Collector role and
// frequency come from the sheet's lowest metric id.
// Throws PreconditionViolation without goals or metrics, UncoveredMetric when
// a metric maps to no step of the tree.
std::vector<DataCollectionSheet> derive_collection_plan(const GqmPlan& plan);

struct CoverageReport {
  std::vector<std::string> unconsumed_metrics;   // (a)
  std::vector<std::string> untraceable_views;    // (b)
  std::vector<std::string> unsupported_goals;    // (c)
  std::vector<std::string> unknown_metrics;      // catena metrics absent from the plan

  bool empty() const;
  std::vector<std::string> lines() const;
};

// A view traces to a goal when its explicit goal annotation names the goal,
// or when its role (id, or title via `roles`) equals the goal's viewpoint.
CoverageReport check_goal_coverage(const GqmPlan& plan, const VisualizationCatena& vc,
                                   const RoleTable* roles = nullptr);

bool view_traces_to_goal(const GqmPlan& plan, const MeasurementGoal& goal, std::string_view role_id,
                         const std::optional<std::string>& goal_annotation, const RoleTable* roles);

}  // namespace spcc

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "spcc/technique_registry.hpp"

namespace spcc {

struct GqmPlan;
class RoleTable;

enum class ViewMechanism { kTable, kTimeSeriesChart, kStatusBoard, kDrillDownTree };
std::string_view to_string(ViewMechanism mechanism);
std::optional<ViewMechanism> view_mechanism_from_string(std::string_view text);

// Declares that the catena consumes the collected series of one metric.
struct DataEntryDecl {
  std::string id;
  std::string metric_id;

  bool operator==(const DataEntryDecl&) const = default;
};

struct FunctionInstance {
  std::string id;
  std::string technique_id;
  ParamMap params;
  std::vector<std::string> inputs;  // data entry or function instance ids

  bool operator==(const FunctionInstance&) const = default;
};

struct PanelDescriptor {
  std::string source;  // function instance id
  std::string label;

  bool operator==(const PanelDescriptor&) const = default;
};

struct ViewInstance {
  std::string id;
  ViewMechanism mechanism = ViewMechanism::kTable;
  std::string role_id;
  std::string title;
  std::vector<std::string> inputs;     // function instance ids only
  std::vector<PanelDescriptor> layout;  // empty: one panel per input, in order
  std::optional<std::string> goal_id;   // explicit traceability annotation

  bool operator==(const ViewInstance&) const = default;
};

// The DAG from collected data through control techniques to role views.
// Catenas are values: every edit produces a copy with a higher version.
struct VisualizationCatena {
  std::string id;
  std::string project_id;
  std::uint64_t version = 1;
  std::vector<DataEntryDecl> data_entries;
  std::vector<FunctionInstance> function_instances;
  std::vector<ViewInstance> view_instances;

  const DataEntryDecl* data_entry(std::string_view id) const;
  const FunctionInstance* function(std::string_view id) const;
  const ViewInstance* view(std::string_view id) const;

  bool operator==(const VisualizationCatena&) const = default;
};

// Equality ignoring the version number.
bool same_structure(const VisualizationCatena& a, const VisualizationCatena& b);

// Document form. catena_from_json validates the document shape and throws
// ParseError naming the offending key.
nlohmann::json to_json(const VisualizationCatena& catena);
VisualizationCatena catena_from_json(const nlohmann::json& doc);
VisualizationCatena load_catena(std::string_view text);

nlohmann::json param_to_json(const ParamValue& value);
ParamValue param_from_json(const nlohmann::json& value, std::string_view where);
nlohmann::json params_to_json(const ParamMap& params);
ParamMap params_from_json(const nlohmann::json& obj, std::string_view where);

enum class FindingCategory {
  kDanglingReference,   // (a) unresolved instance, metric or technique id; duplicate ids
  kCycle,               // (b)
  kSchemaViolation,     // (c) parameters, arity, input kinds, view inputs
  kUnusedDataEntry,     // (d)
  kUnresolvedRole,      // (e)
  kUnusedFunction,      // function instance reachable from no view
};
std::string_view to_string(FindingCategory category);

struct CatenaFinding {
  FindingCategory category;
  std::string subject;  // id of the offending element
  std::string message;
};

struct ValidationReport {
  std::vector<CatenaFinding> findings;

  // True iff there are no dangling references, cycles, or schema violations.
  bool is_valid() const;
  std::size_t count(FindingCategory category) const;
  std::vector<std::string> lines() const;
};

// `roles` may be null, in which case role resolution (e) is skipped.
ValidationReport validate_catena(const VisualizationCatena& vc, const TechniqueRegistry& registry,
                                 const GqmPlan& plan, const RoleTable* roles = nullptr);

// Kahn's algorithm over function instances, ties broken by id. Empty optional
// when the function reference graph has a cycle. Unresolved references are
// ignored here (validation reports them).
std::optional<std::vector<std::string>> topological_order(const VisualizationCatena& vc);

// True when `order` lists every function instance exactly once and each
// instance appears after all function instances it consumes.
bool is_topological_order(const VisualizationCatena& vc, const std::vector<std::string>& order);

// Function instances that transitively consume `instance_id` (excluding it).
std::vector<std::string> dependents_of(const VisualizationCatena& vc, std::string_view instance_id);

// Function instances a view transitively depends on.
std::vector<std::string> upstream_of_view(const VisualizationCatena& vc, std::string_view view_id);

// Metric ids feeding a function instance through data entries.
std::vector<std::string> metrics_feeding(const VisualizationCatena& vc, std::string_view instance_id);

}  // namespace spcc

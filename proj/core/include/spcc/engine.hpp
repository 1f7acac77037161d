#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "spcc/catena.hpp"
#include "spcc/control_techniques.hpp"
#include "spcc/error.hpp"
#include "spcc/measurement.hpp"
#include "spcc/technique_registry.hpp"

namespace spcc {

// ---------------------------------------------------------------------------
// View models: the structured, presentation-neutral form of a rendered view.

struct ViewRow {
  std::string key;  // step path, ISO timestamp, or empty for a summary
  std::string subject_id;
  std::map<std::string, double> values;
  std::string status;  // OK/WARN/VIOLATION/NO_BASELINE or a deviation flag

  bool operator==(const ViewRow&) const = default;
};

struct ViewPanel {
  std::string source;  // function instance id
  std::string label;
  std::string kind;   // value kind of the source output
  std::string state;  // ok | failed | skipped
  std::string error;
  std::vector<ViewRow> rows;
  std::map<std::string, std::size_t> status_counts;
  std::map<std::string, double> meta;

  bool operator==(const ViewPanel&) const = default;
};

struct ViewModel {
  std::string view_id;
  std::string title;
  std::string mechanism;
  std::string role_id;
  std::uint64_t snapshot_version = 0;
  std::uint64_t catena_version = 0;
  std::string drill_path = "/";
  std::vector<ViewPanel> panels;

  bool operator==(const ViewModel&) const = default;
};

nlohmann::json to_json(const ViewModel& view);
nlohmann::json to_json(const Value& value);

// ---------------------------------------------------------------------------
// Execution

enum class InstanceState { kOk, kFailed, kSkipped };
std::string_view to_string(InstanceState state);

struct InstanceOutcome {
  InstanceState state = InstanceState::kOk;
  std::optional<Value> value;
  std::string error;

  bool operator==(const InstanceOutcome&) const = default;
};

// What a result was computed from; kept so drill-down and group filtering
// can re-evaluate without the caller re-supplying inputs.
struct EvaluationContext {
  VisualizationCatena catena;
  std::shared_ptr<const DataSnapshot> snapshot;
  std::shared_ptr<const TechniqueRegistry> registry;
};

struct CatenaResult {
  std::uint64_t snapshot_version = 0;
  std::uint64_t catena_version = 0;
  Timestamp evaluated_at = 0;
  std::map<std::string, InstanceOutcome, std::less<>> functions;
  std::map<std::string, ViewModel, std::less<>> views;
  std::shared_ptr<const EvaluationContext> context;

  const InstanceOutcome* function(std::string_view id) const;
  const ViewModel* view(std::string_view id) const;
  std::vector<TechniqueError> failures() const;

  // Compares everything except `context`.
  bool operator==(const CatenaResult& other) const;
};

nlohmann::json to_json(const CatenaResult& result);

struct ExecutionOptions {
  // Explicit evaluation order; must be a topological order of the function
  // instances. Absent: Kahn order with ties broken by id.
  std::optional<std::vector<std::string>> order;
};

// Evaluates every function instance once in topological order and renders
// every view. A technique that throws marks its instance failed and its
// dependents skipped; independent branches still evaluate.
// Throws CycleError, PreconditionViolation (bad explicit order).
CatenaResult execute_catena(const VisualizationCatena& vc, std::shared_ptr<const DataSnapshot> snapshot,
                            std::shared_ptr<const TechniqueRegistry> registry,
                            const ExecutionOptions& options = {});

// New catena version with `new_params` replacing the instance's parameters.
// Throws UnknownInstance, SchemaViolation.
VisualizationCatena reparameterize(const VisualizationCatena& vc, std::string_view instance_id,
                                   ParamMap new_params, const TechniqueRegistry& registry);

// The view restricted to `step_path` and its descendants, with upstream
// aggregation one level finer than the step. "/" returns the view as is.
// Throws UnknownView, UnknownStep.
ViewModel drill_down(const CatenaResult& result, std::string_view view_id, std::string_view step_path);

// Renders one view from already evaluated function outcomes.
ViewModel render_view(const ViewInstance& view, const std::map<std::string, InstanceOutcome, std::less<>>& outcomes,
                      std::uint64_t snapshot_version, std::uint64_t catena_version);

}  // namespace spcc

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spcc/control_techniques.hpp"

namespace spcc {

enum class TechniquePurpose { kMonitor, kCompare, kPredict, kAggregate, kCheck };
std::string_view to_string(TechniquePurpose purpose);

enum class ParamType {
  kNumber,
  kInteger,
  kBoolean,
  kString,
  kEnum,
  kBaselineRef,  // id of a baseline in the project's baseline set
  kStepPath,
};
std::string_view to_string(ParamType type);

using ParamValue = std::variant<bool, std::int64_t, double, std::string>;
using ParamMap = std::map<std::string, ParamValue, std::less<>>;

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::kNumber;
  bool required = false;
  std::optional<ParamValue> default_value;
  std::optional<double> min;  // inclusive, numeric types only
  std::optional<double> max;
  std::vector<std::string> choices;  // kEnum only
  // Bound to one project (baselines, tolerance thresholds); cleared when a
  // packaged catena is reused.
  bool project_bound = false;
};

struct TechniqueDescriptor {
  std::string technique_id;
  TechniquePurpose purpose = TechniquePurpose::kMonitor;
  std::vector<ParamSpec> params;
  // One entry per input slot listing the accepted kinds; arity = size().
  std::vector<std::vector<ValueKind>> inputs;
  ValueKind output = ValueKind::kSummary;
  // Optional cross-parameter rule run after per-parameter checks, on the
  // parameter map with defaults applied. Throws SchemaViolation.
  std::function<void(const ParamMap&)> check;

  const ParamSpec* param(std::string_view name) const;
};

struct TechniqueContext {
  std::string_view instance_id;
  const ParamMap& params;  // defaults applied
  std::span<const Value* const> inputs;
  const DataSnapshot& snapshot;
};

using Evaluator = std::function<Value(const TechniqueContext&)>;

struct SchemaIssue {
  std::string param;
  std::string reason;
};

class TechniqueRegistry {
 public:
  struct Entry {
    TechniqueDescriptor descriptor;
    Evaluator evaluator;
  };

  // Empty registry; see with_builtins().
  TechniqueRegistry() = default;

  // monitor, compare_to_baseline, tolerance_range_check, predict_course, aggregate.
  static TechniqueRegistry with_builtins();

  // Throws DuplicateTechnique, or SchemaViolation for a malformed descriptor.
  const Entry& register_technique(TechniqueDescriptor descriptor, Evaluator evaluator);

  const Entry* find(std::string_view technique_id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, Entry, std::less<>> entries_;
};

// Per-parameter type/range/choice checks, unknown and missing parameters,
// then the descriptor's cross-parameter rule.
std::vector<SchemaIssue> check_params(const TechniqueDescriptor& descriptor, const ParamMap& params);

// `params` plus defaults for absent optional parameters.
ParamMap with_defaults(const TechniqueDescriptor& descriptor, const ParamMap& params);

// Typed accessors for evaluators; they assume check_params passed.
double number_param(const ParamMap& params, std::string_view name);
std::int64_t integer_param(const ParamMap& params, std::string_view name);
bool bool_param(const ParamMap& params, std::string_view name);
const std::string& string_param(const ParamMap& params, std::string_view name);

std::string describe(const ParamValue& value);

}  // namespace spcc

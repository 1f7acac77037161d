#include "spcc/technique_registry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "spcc/error.hpp"

namespace spcc {

std::string_view to_string(TechniquePurpose purpose) {
  switch (purpose) {
    case TechniquePurpose::kMonitor: return "monitor";
    case TechniquePurpose::kCompare: return "compare";
    case TechniquePurpose::kPredict: return "predict";
    case TechniquePurpose::kAggregate: return "aggregate";
    case TechniquePurpose::kCheck: return "check";
  }
  return "unknown";
}

std::string_view to_string(ParamType type) {
  switch (type) {
    case ParamType::kNumber: return "number";
    case ParamType::kInteger: return "integer";
    case ParamType::kBoolean: return "boolean";
    case ParamType::kString: return "string";
    case ParamType::kEnum: return "enum";
    case ParamType::kBaselineRef: return "baseline";
    case ParamType::kStepPath: return "step-path";
  }
  return "unknown";
}

const ParamSpec* TechniqueDescriptor::param(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const TechniqueRegistry::Entry& TechniqueRegistry::register_technique(TechniqueDescriptor descriptor,
                                                                      Evaluator evaluator) {
  if (descriptor.technique_id.empty()) throw SchemaViolation("technique_id", "must not be empty");
  if (entries_.count(descriptor.technique_id)) {
    throw DuplicateTechnique("technique '" + descriptor.technique_id + "' is already registered");
  }
  if (descriptor.inputs.empty()) throw SchemaViolation("inputs", "arity must be at least 1");
  std::set<std::string> names;
  for (const auto& p : descriptor.params) {
    if (!names.insert(p.name).second) {
      throw SchemaViolation(p.name, "duplicate parameter name in technique schema");
    }
  }
  if (!evaluator) throw SchemaViolation("evaluator", "must be callable");
  const std::string id = descriptor.technique_id;
  auto [it, _] = entries_.emplace(id, Entry{std::move(descriptor), std::move(evaluator)});
  return it->second;
}

const TechniqueRegistry::Entry* TechniqueRegistry::find(std::string_view technique_id) const {
  auto it = entries_.find(technique_id);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> TechniqueRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : entries_) out.push_back(id);
  return out;
}

namespace {

std::optional<double> as_double(const ParamValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

std::optional<std::string> check_one(const ParamSpec& spec, const ParamValue& value) {
  switch (spec.type) {
    case ParamType::kNumber:
    case ParamType::kInteger: {
      auto d = as_double(value);
      if (!d) return std::string("expected ") + std::string(to_string(spec.type));
      if (!std::isfinite(*d)) return "must be finite";
      if (spec.type == ParamType::kInteger && std::floor(*d) != *d) return "expected an integer";
      if (spec.min && *d < *spec.min) return "below minimum " + describe(*spec.min);
      if (spec.max && *d > *spec.max) return "above maximum " + describe(*spec.max);
      return std::nullopt;
    }
    case ParamType::kBoolean:
      if (!std::holds_alternative<bool>(value)) return "expected boolean";
      return std::nullopt;
    case ParamType::kString:
    case ParamType::kBaselineRef:
    case ParamType::kStepPath:
    case ParamType::kEnum: {
      const auto* s = std::get_if<std::string>(&value);
      if (!s) return "expected string";
      if (spec.type == ParamType::kBaselineRef && s->empty()) return "baseline reference must not be empty";
      if (spec.type == ParamType::kStepPath && !is_valid_step_path(*s)) return "not a step path";
      if (spec.type == ParamType::kEnum &&
          std::find(spec.choices.begin(), spec.choices.end(), *s) == spec.choices.end()) {
        std::string allowed;
        for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : "|") + c;
        return "expected one of " + allowed;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

const ParamValue& lookup(const ParamMap& params, std::string_view name) {
  auto it = params.find(name);
  if (it == params.end()) throw SchemaViolation(std::string(name), "missing");
  return it->second;
}

}  // namespace

std::vector<SchemaIssue> check_params(const TechniqueDescriptor& descriptor, const ParamMap& params) {
  std::vector<SchemaIssue> issues;
  for (const auto& [name, _] : params) {
    if (!descriptor.param(name)) issues.push_back({name, "unknown parameter"});
  }
  for (const auto& spec : descriptor.params) {
    auto it = params.find(spec.name);
    if (it == params.end()) {
      if (spec.required) issues.push_back({spec.name, "required parameter missing"});
      continue;
    }
    if (auto problem = check_one(spec, it->second)) issues.push_back({spec.name, *problem});
  }
  if (issues.empty() && descriptor.check) {
    try {
      descriptor.check(with_defaults(descriptor, params));
    } catch (const SchemaViolation& e) {
      issues.push_back({e.param(), e.reason()});
    }
  }
  return issues;
}

ParamMap with_defaults(const TechniqueDescriptor& descriptor, const ParamMap& params) {
  ParamMap out = params;
  for (const auto& spec : descriptor.params) {
    if (spec.default_value && !out.count(spec.name)) out.emplace(spec.name, *spec.default_value);
  }
  return out;
}

double number_param(const ParamMap& params, std::string_view name) {
  auto d = as_double(lookup(params, name));
  if (!d) throw SchemaViolation(std::string(name), "expected number");
  return *d;
}

std::int64_t integer_param(const ParamMap& params, std::string_view name) {
  return static_cast<std::int64_t>(number_param(params, name));
}

bool bool_param(const ParamMap& params, std::string_view name) {
  const auto* b = std::get_if<bool>(&lookup(params, name));
  if (!b) throw SchemaViolation(std::string(name), "expected boolean");
  return *b;
}

const std::string& string_param(const ParamMap& params, std::string_view name) {
  const auto* s = std::get_if<std::string>(&lookup(params, name));
  if (!s) throw SchemaViolation(std::string(name), "expected string");
  return *s;
}

std::string describe(const ParamValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return "\"" + v + "\"";
        } else if constexpr (std::is_same_v<T, double>) {
          char buf[32];
          std::snprintf(buf, sizeof(buf), "%.17g", v);
          return buf;
        } else {
          return std::to_string(v);
        }
      },
      value);
}

}  // namespace spcc

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "spcc/catena.hpp"
#include "spcc/gqm_plan.hpp"
#include "spcc/measurement.hpp"
#include "spcc/technique_registry.hpp"

namespace spcc {

struct CatenaResult;

using FacetValue = std::variant<std::string, double>;

struct ContextProfile {
  std::string project_id;
  std::map<std::string, FacetValue, std::less<>> facets;  // e.g. domain, team_size
  std::string notes;

  bool operator==(const ContextProfile&) const = default;
};

// {"project_id", "characterization": {facet: string | number}, "notes"}
// Throws ParseError for an empty facet name or a non-scalar value.
ContextProfile context_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ContextProfile& context);

// metric id -> status -> count. OK, WARN and VIOLATION are always present;
// NO_BASELINE only when non-zero.
using OutcomeSummary = std::map<std::string, std::map<std::string, std::size_t>>;

// Tallies every classified series in `result` under each metric feeding the
// instance that produced it.
OutcomeSummary summarize_outcome(const CatenaResult& result);

struct ExperiencePackage {
  std::string package_id;  // "<6-digit sequence>-<12 hex of the content hash>"
  std::uint64_t sequence = 0;
  ContextProfile context;
  VisualizationCatena catena;
  GqmPlan plan;
  BaselineSet baselines;
  OutcomeSummary outcome;
  Timestamp created_at = 0;

  bool operator==(const ExperiencePackage&) const = default;
};

// A project-specific parameter that must be supplied before reuse.
struct OpenParameter {
  std::string instance_id;
  std::string param;
  ParamType type = ParamType::kString;
  bool required = false;
  std::optional<ParamValue> archived_value;

  bool operator==(const OpenParameter&) const = default;
};

struct ReuseCandidate {
  std::string package_id;
  double similarity = 0.0;
  std::vector<std::string> matched_facets;
  std::vector<OpenParameter> open_parameters;
  Timestamp created_at = 0;
};

struct CatenaTemplate {
  VisualizationCatena catena;  // project-bound parameters removed
  std::vector<OpenParameter> open_parameters;
};

// |facets of `query` with an equal value in `stored`| / |facets of `query`|.
// Throws PreconditionViolation for an empty query.
double context_similarity(const ContextProfile& query, const ContextProfile& stored,
                          std::vector<std::string>* matched = nullptr);

// Clears every project-bound parameter and lists it as open, keeping the
// data-entry wiring. Throws CorruptPackage if a technique is unknown.
CatenaTemplate reuse_catena(const ExperiencePackage& package, std::string_view new_project_id,
                            const TechniqueRegistry& registry);

using ParameterBindings = std::map<std::pair<std::string, std::string>, ParamValue>;

// The archived values of a template's open parameters.
ParameterBindings archived_bindings(const CatenaTemplate& tmpl);

// Fills the open parameters. Throws SchemaViolation ("<instance>.<param>")
// when a required open parameter is unbound or a bound value is invalid.
VisualizationCatena bind_parameters(const CatenaTemplate& tmpl, const ParameterBindings& values,
                                    const TechniqueRegistry& registry);

// Append-only package store rooted at `<root>/packages`. Each package is a
// directory of plan.json, context.json, catena.json, baselines.csv and
// outcome.json, written under a temporary name and renamed into place.
class ExperienceBase {
 public:
  explicit ExperienceBase(std::string root);

  // Throws NoResults when `result` is null, CorruptPackage when the catena
  // does not validate against `plan`, StorageError.
  ExperiencePackage package_results(const VisualizationCatena& vc, const CatenaResult* result,
                                    const ContextProfile& context, const GqmPlan& plan,
                                    const BaselineSet& baselines, const TechniqueRegistry& registry,
                                    Timestamp created_at);

  // Throws UnknownPackage, CorruptPackage (unparsable, invalid, or content
  // no longer matching the id's hash).
  ExperiencePackage load(std::string_view package_id, const TechniqueRegistry& registry) const;

  std::vector<std::string> list() const;

  // Ranked by similarity, then newer creation time, then higher sequence.
  // Unreadable packages are skipped. Throws PreconditionViolation for an
  // empty query.
  std::vector<ReuseCandidate> retrieve_candidates(const ContextProfile& query,
                                                  const TechniqueRegistry& registry) const;

  const std::string& root() const { return root_; }

 private:
  std::string root_;
  mutable std::mutex write_mutex_;
};

}  // namespace spcc

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "spcc/access_control.hpp"
#include "spcc/catena.hpp"
#include "spcc/engine.hpp"
#include "spcc/experience_base.hpp"
#include "spcc/gqm_plan.hpp"
#include "spcc/ingestion.hpp"
#include "spcc/measurement.hpp"
#include "spcc/technique_registry.hpp"

namespace spcc {

// Everything a project is registered with.
struct ProjectRegistration {
  std::string project_id;
  GqmPlan plan;
  VisualizationCatena catena;
  BaselineSet baselines;
  ContextProfile context;
  std::vector<SourceAdapter> sources;
  RoleTable roles;
  TokenStore tokens;
  SubjectGroups groups;
};

// Bundle document keys: plan, catena, baselines (CSV text or an array of
// {metric, process_step, planned, unit}), context, sources, roles, tokens,
// subject_groups ({subject: group}). Throws ParseError.
ProjectRegistration registration_from_json(std::string_view project_id, const nlohmann::json& bundle);

// Reads `<dir>/project.json`, whose string values for the keys above name
// files relative to `dir`, and returns the bundle with every file inlined.
nlohmann::json load_bundle_dir(const std::string& dir);

// Cross-validation run at registration: catena structure and roles,
// goal coverage, and baseline references. Empty when the bundle is sound.
std::vector<std::string> registration_findings(const ProjectRegistration& reg, const TechniqueRegistry& registry);

struct Alert {
  std::string alert_id;
  std::string project_id;
  std::string instance_id;
  std::string step_path;
  std::string subject_id;
  Status status = Status::kWarn;
  std::uint64_t first_seen_version = 0;  // snapshot version
  std::uint64_t first_seen_catena_version = 0;
  std::optional<std::uint64_t> cleared_at_version;
  std::optional<std::uint64_t> cleared_at_catena_version;

  bool open() const { return !cleared_at_version.has_value(); }
  bool operator==(const Alert&) const = default;
};

nlohmann::json to_json(const Alert& alert);

// Open alerts track WARN/VIOLATION points of the latest evaluation, one per
// (instance, step, subject, status); an alert closes when its point no
// longer carries that status. The control center reconciles after every
// state change, so the book is a function of the change sequence alone.
class AlertBook {
 public:
  void reconcile(const std::string& project_id, const CatenaResult& result);
  const std::vector<Alert>& alerts() const { return alerts_; }

 private:
  std::vector<Alert> alerts_;
  std::uint64_t next_id_ = 1;
};

struct ViewsResponse {
  std::string project_id;
  std::uint64_t snapshot_version = 0;
  std::uint64_t catena_version = 0;
  std::vector<ViewModel> views;
};

struct AlertsResponse {
  std::string project_id;
  std::uint64_t snapshot_version = 0;
  std::uint64_t catena_version = 0;
  std::uint64_t since = 0;
  std::vector<Alert> alerts;
};

struct CatenaVersion {
  std::uint64_t version = 0;
  std::string change;       // "registered" or "reparameterized"
  std::string instance_id;  // the edited instance, if any
  VisualizationCatena catena;
  std::uint64_t snapshot_version = 0;  // data version the change was made at
};

nlohmann::json to_json(const ViewsResponse& response);
nlohmann::json to_json(const AlertsResponse& response);
nlohmann::json to_json(const CatenaVersion& version);

struct ServiceOptions {
  // Projects, batches, catena versions and the experience base live here.
  // Empty: in memory only (packaging then fails with StorageError).
  std::string store_root;
  // Creation time of packages.
  std::function<Timestamp()> clock;
};

class ControlCenter {
 public:
  explicit ControlCenter(ServiceOptions options = {},
                         std::shared_ptr<const TechniqueRegistry> registry = nullptr);
  ~ControlCenter();

  ControlCenter(const ControlCenter&) = delete;
  ControlCenter& operator=(const ControlCenter&) = delete;

  const TechniqueRegistry& registry() const { return *registry_; }

  // Throws ValidationFailed, DuplicateProject, StorageError.
  void register_project(ProjectRegistration registration, const nlohmann::json* bundle = nullptr);
  std::vector<std::string> projects() const;
  bool has_project(std::string_view project_id) const;

  // Throws UnknownProject, InvalidToken.
  Principal authenticate(std::string_view project_id, std::string_view token) const;

  // Commits the batch and re-evaluates the project before returning.
  // Throws UnknownProject, UnknownSource, DuplicateBatch, EncodingError,
  // ParseError, StorageError.
  IngestReceipt ingest(std::string_view project_id, std::string_view source_id, std::string_view payload,
                       RecordFormat format);

  // `role` filters by role id or title. Throws UnknownProject, AccessDenied.
  ViewsResponse get_views(std::string_view project_id, const Principal& principal,
                          std::optional<std::string_view> role = std::nullopt);

  // Throws UnknownProject, UnknownView, UnknownStep, AccessDenied.
  ViewModel drill(std::string_view project_id, const Principal& principal, std::string_view view_id,
                  std::string_view step_path);

  // Merges `set` into the instance's parameters, removes `unset`, and
  // commits a new catena version. All-groups principals only.
  // Throws UnknownProject, AccessDenied, UnknownInstance, SchemaViolation.
  CatenaVersion update_parameters(std::string_view project_id, const Principal& principal,
                                  std::string_view instance_id, const ParamMap& set,
                                  const std::vector<std::string>& unset = {});

  // Open alerts plus alerts cleared at a snapshot version after `since`.
  AlertsResponse list_alerts(std::string_view project_id, const Principal& principal, std::uint64_t since = 0);

  // Packages the latest evaluated result. All-groups principals only.
  // Throws StorageError without a store root.
  ExperiencePackage package(std::string_view project_id, const Principal& principal);

  std::vector<CatenaVersion> history(std::string_view project_id) const;

  // Evaluates (or returns the cached result for) the latest snapshot and
  // catena versions.
  std::shared_ptr<const CatenaResult> evaluate_latest(std::string_view project_id);

  std::shared_ptr<const DataSnapshot> snapshot(std::string_view project_id) const;
  VisualizationCatena catena(std::string_view project_id) const;
  nlohmann::json project_info(std::string_view project_id) const;

 private:
  struct Project;

  std::shared_ptr<Project> find(std::string_view project_id) const;
  std::shared_ptr<const CatenaResult> evaluate_locked(Project& p);
  std::shared_ptr<const CatenaResult> group_result_locked(Project& p, const std::string& group_id);
  void persist_catena_version(const Project& p, const CatenaVersion& v) const;
  void load_store();

  ServiceOptions options_;
  std::shared_ptr<const TechniqueRegistry> registry_;
  std::unique_ptr<ExperienceBase> experience_;
  mutable std::shared_mutex projects_mutex_;
  std::map<std::string, std::shared_ptr<Project>, std::less<>> projects_;
};

}  // namespace spcc

#include "spcc/service.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "spcc/error.hpp"
#include "spcc/timestamp.hpp"

namespace spcc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string padded(std::uint64_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*llu", width, static_cast<unsigned long long>(n));
  return buf;
}

bool is_safe_id(std::string_view id) {
  if (id.empty() || id.size() > 128 || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
           c == '.';
  });
}

void write_atomic(const fs::path& target, const std::string& content) {
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) throw StorageError("cannot create '" + target.parent_path().string() + "': " + ec.message());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) throw StorageError("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, target, ec);
  if (ec) throw StorageError("cannot commit '" + target.string() + "'");
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw StorageError("cannot read '" + p.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json optional_version(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

// ---------------------------------------------------------------------------
// Alerts

json to_json(const Alert& a) {
  return {{"alert_id", a.alert_id},
          {"project_id", a.project_id},
          {"instance_id", a.instance_id},
          {"step_path", a.step_path},
          {"subject", a.subject_id},
          {"status", to_string(a.status)},
          {"first_seen_version", a.first_seen_version},
          {"first_seen_catena_version", a.first_seen_catena_version},
          {"cleared_at_version", optional_version(a.cleared_at_version)},
          {"cleared_at_catena_version", optional_version(a.cleared_at_catena_version)}};
}

void AlertBook::reconcile(const std::string& project_id, const CatenaResult& result) {
  using Key = std::tuple<std::string, std::string, std::string, Status>;
  std::vector<Key> current;
  std::set<Key> current_set;
  for (const auto& [id, o] : result.functions) {
    if (!o.value) continue;
    const auto* classified = std::get_if<ClassifiedSeries>(&*o.value);
    if (!classified) continue;
    for (const auto& p : classified->points) {
      if (p.status != Status::kWarn && p.status != Status::kViolation) continue;
      Key k{id, p.step_path, p.subject_id, p.status};
      if (current_set.insert(k).second) current.push_back(std::move(k));
    }
  }

  std::set<Key> open;
  for (auto& a : alerts_) {
    if (!a.open()) continue;
    Key k{a.instance_id, a.step_path, a.subject_id, a.status};
    if (current_set.count(k)) {
      open.insert(std::move(k));
    } else {
      a.cleared_at_version = result.snapshot_version;
      a.cleared_at_catena_version = result.catena_version;
    }
  }
  for (const auto& k : current) {
    if (open.count(k)) continue;
    Alert a;
    a.alert_id = "alert-" + padded(next_id_++, 6);
    a.project_id = project_id;
    std::tie(a.instance_id, a.step_path, a.subject_id, a.status) = k;
    a.first_seen_version = result.snapshot_version;
    a.first_seen_catena_version = result.catena_version;
    alerts_.push_back(std::move(a));
  }
}

json to_json(const ViewsResponse& r) {
  json views = json::array();
  for (const auto& v : r.views) views.push_back(to_json(v));
  return {{"project_id", r.project_id},
          {"snapshot_version", r.snapshot_version},
          {"catena_version", r.catena_version},
          {"views", views}};
}

json to_json(const AlertsResponse& r) {
  json alerts = json::array();
  for (const auto& a : r.alerts) alerts.push_back(to_json(a));
  return {{"project_id", r.project_id},
          {"snapshot_version", r.snapshot_version},
          {"catena_version", r.catena_version},
          {"since", r.since},
          {"alerts", alerts}};
}

json to_json(const CatenaVersion& v) {
  json out = {{"version", v.version},
              {"change", v.change},
              {"snapshot_version", v.snapshot_version},
              {"catena", to_json(v.catena)}};
  if (!v.instance_id.empty()) out["instance_id"] = v.instance_id;
  return out;
}

// ---------------------------------------------------------------------------
// Control center

struct ControlCenter::Project {
  ProjectRegistration reg;
  std::shared_ptr<const GqmPlan> plan;
  AccessPolicy policy;
  std::unique_ptr<MeasurementStore> store;
  fs::path dir;  // empty when in memory

  // Guards everything below: catena edits, the evaluation cache, alerts.
  std::mutex mutex;
  std::vector<CatenaVersion> versions;
  std::shared_ptr<const CatenaResult> cached;
  std::map<std::string, std::shared_ptr<const CatenaResult>> group_cache;
  AlertBook alerts;
};

ControlCenter::ControlCenter(ServiceOptions options, std::shared_ptr<const TechniqueRegistry> registry)
    : options_(std::move(options)), registry_(std::move(registry)) {
  if (!registry_) registry_ = std::make_shared<const TechniqueRegistry>(TechniqueRegistry::with_builtins());
  if (!options_.clock) {
    options_.clock = [] {
      return static_cast<Timestamp>(
          std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
              .count());
    };
  }
  if (!options_.store_root.empty()) {
    experience_ = std::make_unique<ExperienceBase>(options_.store_root);
    load_store();
  }
}

ControlCenter::~ControlCenter() = default;

std::shared_ptr<ControlCenter::Project> ControlCenter::find(std::string_view project_id) const {
  std::shared_lock lock(projects_mutex_);
  auto it = projects_.find(project_id);
  if (it == projects_.end()) throw UnknownProject("project '" + std::string(project_id) + "' is not registered");
  return it->second;
}

std::vector<std::string> ControlCenter::projects() const {
  std::shared_lock lock(projects_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, p] : projects_) out.push_back(id);
  return out;
}

bool ControlCenter::has_project(std::string_view project_id) const {
  std::shared_lock lock(projects_mutex_);
  return projects_.find(project_id) != projects_.end();
}

void ControlCenter::register_project(ProjectRegistration registration, const json* bundle) {
  if (!is_safe_id(registration.project_id)) {
    throw ValidationFailed({"project id '" + registration.project_id + "' must use letters, digits, '-', '_' or '.'"});
  }
  registration.catena.project_id = registration.project_id;
  if (auto findings = registration_findings(registration, *registry_); !findings.empty()) {
    throw ValidationFailed(std::move(findings));
  }

  auto p = std::make_shared<Project>();
  p->plan = std::make_shared<const GqmPlan>(registration.plan);
  p->policy = AccessPolicy{registration.roles, registration.groups};
  p->versions.push_back({registration.catena.version, "registered", {}, registration.catena});

  std::unique_lock lock(projects_mutex_);
  if (projects_.count(registration.project_id)) {
    throw DuplicateProject("project '" + registration.project_id + "' is already registered");
  }
  std::unique_ptr<BatchSink> sink;
  if (!options_.store_root.empty()) {
    p->dir = fs::path(options_.store_root) / "projects" / registration.project_id;
    std::error_code ec;
    if (fs::exists(p->dir / "bundle.json", ec)) {
      throw DuplicateProject("project '" + registration.project_id + "' already exists in the store");
    }
    if (bundle) write_atomic(p->dir / "bundle.json", bundle->dump(2) + "\n");
    persist_catena_version(*p, p->versions.front());
    sink = std::make_unique<FileBatchSink>((p->dir / "batches").string());
  }
  p->store = std::make_unique<MeasurementStore>(registration.project_id, p->plan, registration.baselines,
                                                registration.sources, std::move(sink));
  p->reg = std::move(registration);
  {
    std::lock_guard project_lock(p->mutex);
    evaluate_locked(*p);
  }
  projects_.emplace(p->reg.project_id, std::move(p));
}

void ControlCenter::persist_catena_version(const Project& p, const CatenaVersion& v) const {
  if (p.dir.empty()) return;
  write_atomic(p.dir / "catena" / (padded(v.version, 8) + ".json"), to_json(v).dump(2) + "\n");
}

void ControlCenter::load_store() {
  const fs::path projects_dir = fs::path(options_.store_root) / "projects";
  std::error_code ec;
  if (!fs::is_directory(projects_dir, ec)) return;
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(projects_dir, ec)) {
    if (e.is_directory() && fs::exists(e.path() / "bundle.json")) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    const std::string id = dir.filename().string();
    json bundle;
    try {
      bundle = json::parse(read_text(dir / "bundle.json"));
    } catch (const json::exception& e) {
      throw StorageError("corrupt bundle for project '" + id + "': " + e.what());
    }
    auto reg = registration_from_json(id, bundle);

    auto p = std::make_shared<Project>();
    p->dir = dir;
    p->plan = std::make_shared<const GqmPlan>(reg.plan);
    p->policy = AccessPolicy{reg.roles, reg.groups};

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir / "catena", ec)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      try {
        const json doc = json::parse(read_text(f));
        CatenaVersion v;
        v.version = doc.at("version").get<std::uint64_t>();
        v.change = doc.at("change").get<std::string>();
        v.instance_id = doc.value("instance_id", std::string());
        v.catena = catena_from_json(doc.at("catena"));
        v.catena.project_id = id;
        v.snapshot_version = doc.value("snapshot_version", std::uint64_t{0});
        p->versions.push_back(std::move(v));
      } catch (const json::exception& e) {
        throw StorageError("corrupt catena version '" + f.string() + "': " + e.what());
      }
    }
    if (p->versions.empty()) p->versions.push_back({reg.catena.version, "registered", {}, reg.catena});

    const std::string batches = (dir / "batches").string();
    p->store = std::make_unique<MeasurementStore>(id, p->plan, reg.baselines, reg.sources,
                                                  std::make_unique<FileBatchSink>(batches));
    p->reg = std::move(reg);

    // Re-run the recorded change sequence so alerts come back as they were:
    // a catena edit made at data version s follows batch s.
    auto all_versions = std::move(p->versions);
    p->versions.clear();
    std::size_t next_version = 0;
    auto apply_edits = [&]() {
      while (next_version < all_versions.size() &&
             (p->versions.empty() || all_versions[next_version].snapshot_version <= p->store->version())) {
        p->versions.push_back(all_versions[next_version++]);
        evaluate_locked(*p);
      }
    };
    apply_edits();
    for (auto& batch : FileBatchSink::load(batches)) {
      p->store->replay({std::move(batch)});
      evaluate_locked(*p);
      apply_edits();
    }
    while (next_version < all_versions.size()) p->versions.push_back(all_versions[next_version++]);
    evaluate_locked(*p);
    projects_.emplace(id, std::move(p));
  }
}

Principal ControlCenter::authenticate(std::string_view project_id, std::string_view token) const {
  auto p = find(project_id);
  return p->reg.tokens.authenticate(token);
}

IngestReceipt ControlCenter::ingest(std::string_view project_id, std::string_view source_id, std::string_view payload,
                                    RecordFormat format) {
  auto p = find(project_id);
  std::lock_guard lock(p->mutex);
  auto receipt = p->store->ingest(source_id, payload, format);
  evaluate_locked(*p);
  return receipt;
}

std::shared_ptr<const CatenaResult> ControlCenter::evaluate_locked(Project& p) {
  auto snap = p.store->snapshot();
  const auto& vc = p.versions.back().catena;
  if (p.cached && p.cached->snapshot_version == snap->version && p.cached->catena_version == vc.version) {
    return p.cached;
  }
  auto result = std::make_shared<const CatenaResult>(execute_catena(vc, snap, registry_));
  p.alerts.reconcile(p.reg.project_id, *result);
  p.group_cache.clear();
  p.cached = result;
  return result;
}

std::shared_ptr<const CatenaResult> ControlCenter::group_result_locked(Project& p, const std::string& group_id) {
  auto it = p.group_cache.find(group_id);
  if (it != p.group_cache.end()) return it->second;
  auto r = std::make_shared<const CatenaResult>(evaluate_for_group(*p.cached, group_id, p.policy.groups));
  p.group_cache.emplace(group_id, r);
  return r;
}

std::shared_ptr<const CatenaResult> ControlCenter::evaluate_latest(std::string_view project_id) {
  auto p = find(project_id);
  std::lock_guard lock(p->mutex);
  return evaluate_locked(*p);
}

ViewsResponse ControlCenter::get_views(std::string_view project_id, const Principal& principal,
                                       std::optional<std::string_view> role) {
  auto p = find(project_id);
  std::optional<std::string> role_id;
  if (role) {
    role_id = std::string(*role);
    for (const auto& r : p->policy.roles.roles()) {
      if (r.role_id == *role || r.title == *role) role_id = r.role_id;
    }
  }
  const bool full = has_full_scope(principal, p->policy);
  if (!full) {
    if (!p->policy.roles.contains(principal.role_id)) {
      throw AccessDenied("role '" + principal.role_id + "' is not defined");
    }
    if (role_id && *role_id != principal.role_id) {
      throw AccessDenied("role '" + principal.role_id + "' may not open views of role '" + *role_id + "'");
    }
  }

  std::lock_guard lock(p->mutex);
  auto result = evaluate_locked(*p);
  std::shared_ptr<const CatenaResult> group;
  if (!full) group = group_result_locked(*p, principal.group_id);

  ViewsResponse out{p->reg.project_id, result->snapshot_version, result->catena_version, {}};
  for (const auto& v : result->context->catena.view_instances) {
    if (role_id && v.role_id != *role_id) continue;
    if (!full && v.role_id != principal.role_id) continue;
    out.views.push_back(authorize_view(principal, p->policy, v.id, *result, group.get()));
  }
  return out;
}

ViewModel ControlCenter::drill(std::string_view project_id, const Principal& principal, std::string_view view_id,
                               std::string_view step_path) {
  auto p = find(project_id);
  std::lock_guard lock(p->mutex);
  auto result = evaluate_locked(*p);
  if (has_full_scope(principal, p->policy)) return drill_down(*result, view_id, step_path);
  auto group = group_result_locked(*p, principal.group_id);
  authorize_view(principal, p->policy, view_id, *result, group.get());
  return drill_down(*group, view_id, step_path);
}

CatenaVersion ControlCenter::update_parameters(std::string_view project_id, const Principal& principal,
                                               std::string_view instance_id, const ParamMap& set,
                                               const std::vector<std::string>& unset) {
  auto p = find(project_id);
  if (!has_full_scope(principal, p->policy)) {
    throw AccessDenied("role '" + principal.role_id + "' may not change catena parameters");
  }
  std::lock_guard lock(p->mutex);
  const auto& current = p->versions.back().catena;
  const auto* f = current.function(instance_id);
  if (!f) throw UnknownInstance("function instance '" + std::string(instance_id) + "' does not exist");
  ParamMap merged = f->params;
  for (const auto& name : unset) merged.erase(name);
  for (const auto& [name, value] : set) merged[name] = value;

  CatenaVersion next{0, "reparameterized", std::string(instance_id),
                     reparameterize(current, instance_id, std::move(merged), *registry_)};
  next.version = next.catena.version;
  next.snapshot_version = p->store->version();
  persist_catena_version(*p, next);
  p->versions.push_back(next);
  evaluate_locked(*p);
  return next;
}

AlertsResponse ControlCenter::list_alerts(std::string_view project_id, const Principal& principal,
                                          std::uint64_t since) {
  auto p = find(project_id);
  const bool full = has_full_scope(principal, p->policy);
  std::lock_guard lock(p->mutex);
  auto result = evaluate_locked(*p);
  AlertsResponse out{p->reg.project_id, result->snapshot_version, result->catena_version, since, {}};
  for (const auto& a : p->alerts.alerts()) {
    if (!a.open() && *a.cleared_at_version <= since) continue;
    if (!full && (a.subject_id.empty() || p->policy.groups.group_of(a.subject_id) != principal.group_id)) continue;
    out.alerts.push_back(a);
  }
  return out;
}

ExperiencePackage ControlCenter::package(std::string_view project_id, const Principal& principal) {
  auto p = find(project_id);
  if (!has_full_scope(principal, p->policy)) {
    throw AccessDenied("role '" + principal.role_id + "' may not package project results");
  }
  std::lock_guard lock(p->mutex);
  if (!p->cached) throw NoResults("project '" + p->reg.project_id + "' has no executed catena result");
  if (!experience_) throw StorageError("no store root configured for the experience base");
  return experience_->package_results(p->cached->context->catena, p->cached.get(), p->reg.context, p->reg.plan,
                                      p->reg.baselines, *registry_, options_.clock());
}

std::vector<CatenaVersion> ControlCenter::history(std::string_view project_id) const {
  auto p = find(project_id);
  std::lock_guard lock(p->mutex);
  return p->versions;
}

std::shared_ptr<const DataSnapshot> ControlCenter::snapshot(std::string_view project_id) const {
  return find(project_id)->store->snapshot();
}

VisualizationCatena ControlCenter::catena(std::string_view project_id) const {
  auto p = find(project_id);
  std::lock_guard lock(p->mutex);
  return p->versions.back().catena;
}

json ControlCenter::project_info(std::string_view project_id) const {
  auto p = find(project_id);
  std::lock_guard lock(p->mutex);
  json goals = json::array();
  for (const auto& g : p->reg.plan.goals) goals.push_back({{"goal_id", g.goal_id}, {"statement", g.render()}});
  json views = json::array();
  for (const auto& v : p->versions.back().catena.view_instances) {
    views.push_back({{"view_id", v.id}, {"role", v.role_id}, {"mechanism", to_string(v.mechanism)}, {"title", v.title}});
  }
  return {{"project_id", p->reg.project_id},
          {"snapshot_version", p->store->version()},
          {"catena_version", p->versions.back().catena.version},
          {"goals", goals},
          {"views", views},
          {"roles", to_json(p->reg.roles)},
          {"sources", to_json(p->reg.sources)},
          {"context", to_json(p->reg.context)}};
}

}  // namespace spcc

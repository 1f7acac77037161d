#include "spcc/access_control.hpp"

#include <nlohmann/json.hpp>

#include "spcc/engine.hpp"
#include "spcc/error.hpp"
#include "spcc/hashing.hpp"

namespace spcc {

std::string_view to_string(Scope scope) {
  return scope == Scope::kAllGroups ? "all-groups" : "own-group";
}

void RoleTable::add(Role role) {
  if (role.role_id.empty()) throw ParseError("role id must not be empty");
  if (contains(role.role_id)) throw ParseError("duplicate role '" + role.role_id + "'");
  roles_.push_back(std::move(role));
}

const Role* RoleTable::find(std::string_view role_id) const {
  for (const auto& r : roles_) {
    if (r.role_id == role_id) return &r;
  }
  return nullptr;
}

void SubjectGroups::assign(std::string subject_id, std::string group_id) {
  mapping_[std::move(subject_id)] = std::move(group_id);
}

std::string SubjectGroups::group_of(std::string_view subject_id) const {
  auto it = mapping_.find(subject_id);
  return it == mapping_.end() ? std::string(subject_id) : it->second;
}

void TokenStore::add(std::string token, Principal principal) {
  if (token.empty()) throw ParseError("token must not be empty");
  entries_.emplace_back(std::move(token), std::move(principal));
}

Principal TokenStore::authenticate(std::string_view token) const {
  // Every entry is compared so timing does not reveal which one matched.
  const Principal* match = nullptr;
  for (const auto& [stored, principal] : entries_) {
    const bool eq = constant_time_equal(stored, token);
    if (eq && !match) match = &principal;
  }
  if (!match) throw InvalidToken("token is not recognised");
  return *match;
}

namespace {

std::string required_string(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_string() || obj.at(key).get<std::string>().empty()) {
    throw ParseError(where + "." + key + ": expected a non-empty string");
  }
  return obj.at(key).get<std::string>();
}

}  // namespace

RoleTable roles_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw ParseError("roles: expected an array");
  RoleTable table;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& r = doc[i];
    const std::string where = "roles[" + std::to_string(i) + "]";
    if (!r.is_object()) throw ParseError(where + ": expected an object");
    Role role;
    role.role_id = required_string(r, "role_id", where);
    role.title = r.contains("title") ? required_string(r, "title", where) : role.role_id;
    const std::string scope = r.contains("scope") ? required_string(r, "scope", where) : "own-group";
    if (scope == "all-groups") {
      role.scope = Scope::kAllGroups;
    } else if (scope == "own-group") {
      role.scope = Scope::kOwnGroup;
    } else {
      throw ParseError(where + ".scope: expected 'all-groups' or 'own-group'");
    }
    table.add(std::move(role));
  }
  return table;
}

nlohmann::json to_json(const RoleTable& roles) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : roles.roles()) {
    out.push_back({{"role_id", r.role_id}, {"title", r.title}, {"scope", to_string(r.scope)}});
  }
  return out;
}

TokenStore tokens_from_json(const nlohmann::json& doc, const RoleTable& roles) {
  if (!doc.is_array()) throw ParseError("tokens: expected an array");
  TokenStore store;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& t = doc[i];
    const std::string where = "tokens[" + std::to_string(i) + "]";
    if (!t.is_object()) throw ParseError(where + ": expected an object");
    Principal p;
    p.principal_id = required_string(t, "principal_id", where);
    p.role_id = required_string(t, "role_id", where);
    if (!roles.contains(p.role_id)) throw ParseError(where + ".role_id: unknown role '" + p.role_id + "'");
    if (t.contains("group_id")) {
      if (!t.at("group_id").is_string()) throw ParseError(where + ".group_id: expected a string");
      p.group_id = t.at("group_id").get<std::string>();
    }
    if (roles.find(p.role_id)->scope == Scope::kOwnGroup && p.group_id.empty()) {
      throw ParseError(where + ".group_id: required for an own-group role");
    }
    store.add(required_string(t, "token", where), std::move(p));
  }
  return store;
}

DataSnapshot restrict_to_group(const DataSnapshot& snapshot, std::string_view group_id,
                               const SubjectGroups& groups) {
  return snapshot.filtered(
      [&](const MeasurementPoint& p) { return groups.group_of(p.subject_id) == group_id; });
}

CatenaResult evaluate_for_group(const CatenaResult& result, std::string_view group_id,
                                const SubjectGroups& groups) {
  if (!result.context) throw PreconditionViolation("result carries no evaluation context");
  const auto& ctx = *result.context;
  auto restricted = std::make_shared<const DataSnapshot>(restrict_to_group(*ctx.snapshot, group_id, groups));
  auto out = execute_catena(ctx.catena, restricted, ctx.registry);
  out.evaluated_at = result.evaluated_at;
  return out;
}

bool has_full_scope(const Principal& principal, const AccessPolicy& policy) {
  const auto* role = policy.roles.find(principal.role_id);
  return role && role->scope == Scope::kAllGroups;
}

ViewModel authorize_view(const Principal& principal, const AccessPolicy& policy, std::string_view view_id,
                         const CatenaResult& result, const CatenaResult* group_result) {
  const auto* view = result.view(view_id);
  if (!view) throw UnknownView("view '" + std::string(view_id) + "' does not exist");
  const auto* role = policy.roles.find(principal.role_id);
  if (!role) throw AccessDenied("role '" + principal.role_id + "' is not defined");
  if (role->scope == Scope::kAllGroups) return *view;
  if (view->role_id != principal.role_id) {
    throw AccessDenied("view '" + std::string(view_id) + "' belongs to role '" + view->role_id + "'");
  }
  if (group_result) {
    const auto* v = group_result->view(view_id);
    if (!v) throw UnknownView("view '" + std::string(view_id) + "' does not exist");
    return *v;
  }
  return *evaluate_for_group(result, principal.group_id, policy.groups).view(view_id);
}

}  // namespace spcc

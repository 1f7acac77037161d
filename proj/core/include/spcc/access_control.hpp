#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace spcc {

struct CatenaResult;
struct ViewModel;
struct DataSnapshot;

enum class Scope { kAllGroups, kOwnGroup };
std::string_view to_string(Scope scope);

struct Role {
  std::string role_id;
  std::string title;
  Scope scope = Scope::kOwnGroup;

  bool operator==(const Role&) const = default;
};

class RoleTable {
 public:
  // Throws ParseError on a duplicate role id.
  void add(Role role);
  const Role* find(std::string_view role_id) const;
  bool contains(std::string_view role_id) const { return find(role_id) != nullptr; }
  const std::vector<Role>& roles() const { return roles_; }

  bool operator==(const RoleTable&) const = default;

 private:
  std::vector<Role> roles_;
};

struct Principal {
  std::string principal_id;
  std::string role_id;
  std::string group_id;

  bool operator==(const Principal&) const = default;
};

// Maps subject ids (people or groups) to groups. A subject without an
// explicit mapping is its own group.
class SubjectGroups {
 public:
  void assign(std::string subject_id, std::string group_id);
  std::string group_of(std::string_view subject_id) const;
  const std::map<std::string, std::string, std::less<>>& mapping() const { return mapping_; }

  bool operator==(const SubjectGroups&) const = default;

 private:
  std::map<std::string, std::string, std::less<>> mapping_;
};

struct AccessPolicy {
  RoleTable roles;
  SubjectGroups groups;

  bool operator==(const AccessPolicy&) const = default;
};

// Static bearer tokens. Lookups compare every stored token in constant time
// and never exit early.
class TokenStore {
 public:
  void add(std::string token, Principal principal);
  Principal authenticate(std::string_view token) const;  // throws InvalidToken
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<std::pair<std::string, Principal>> entries_;
};

// tokens.json: [{"token", "principal_id", "role_id", "group_id"}, ...]
// roles.json:  [{"role_id", "title", "scope": "all-groups" | "own-group"}, ...]
TokenStore tokens_from_json(const nlohmann::json& doc, const RoleTable& roles);
RoleTable roles_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RoleTable& roles);

// Data of one group only: every measurement point whose subject belongs to
// another group is removed.
DataSnapshot restrict_to_group(const DataSnapshot& snapshot, std::string_view group_id,
                               const SubjectGroups& groups);

// Re-evaluates the result's catena over the group-restricted snapshot, so
// every aggregate is computed from the group's own raw points only.
CatenaResult evaluate_for_group(const CatenaResult& result, std::string_view group_id,
                                const SubjectGroups& groups);

// All-groups principals get the view unchanged. Own-group principals may
// only open views of their own role and receive the view evaluated over
// their group's data (see evaluate_for_group). `group_result`, when given,
// must be evaluate_for_group(result, principal.group_id, ...) and is reused.
// Throws AccessDenied, UnknownView.
ViewModel authorize_view(const Principal& principal, const AccessPolicy& policy,
                         std::string_view view_id, const CatenaResult& result,
                         const CatenaResult* group_result = nullptr);

bool has_full_scope(const Principal& principal, const AccessPolicy& policy);

}  // namespace spcc

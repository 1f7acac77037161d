#include "spcc/catena.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "spcc/access_control.hpp"
#include "spcc/error.hpp"
#include "spcc/gqm_plan.hpp"

namespace spcc {

using nlohmann::json;

std::string_view to_string(ViewMechanism mechanism) {
  switch (mechanism) {
    case ViewMechanism::kTable: return "table";
    case ViewMechanism::kTimeSeriesChart: return "time-series-chart";
    case ViewMechanism::kStatusBoard: return "status-board";
    case ViewMechanism::kDrillDownTree: return "drill-down-tree";
  }
  return "unknown";
}

std::optional<ViewMechanism> view_mechanism_from_string(std::string_view text) {
  for (auto m : {ViewMechanism::kTable, ViewMechanism::kTimeSeriesChart, ViewMechanism::kStatusBoard,
                 ViewMechanism::kDrillDownTree}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

std::string_view to_string(FindingCategory category) {
  switch (category) {
    case FindingCategory::kDanglingReference: return "dangling-reference";
    case FindingCategory::kCycle: return "cycle";
    case FindingCategory::kSchemaViolation: return "schema-violation";
    case FindingCategory::kUnusedDataEntry: return "unused-data-entry";
    case FindingCategory::kUnresolvedRole: return "unresolved-role";
    case FindingCategory::kUnusedFunction: return "unused-function";
  }
  return "unknown";
}

const DataEntryDecl* VisualizationCatena::data_entry(std::string_view entry_id) const {
  for (const auto& d : data_entries) {
    if (d.id == entry_id) return &d;
  }
  return nullptr;
}

const FunctionInstance* VisualizationCatena::function(std::string_view instance_id) const {
  for (const auto& f : function_instances) {
    if (f.id == instance_id) return &f;
  }
  return nullptr;
}

const ViewInstance* VisualizationCatena::view(std::string_view view_id) const {
  for (const auto& v : view_instances) {
    if (v.id == view_id) return &v;
  }
  return nullptr;
}

bool same_structure(const VisualizationCatena& a, const VisualizationCatena& b) {
  return a.id == b.id && a.project_id == b.project_id && a.data_entries == b.data_entries &&
         a.function_instances == b.function_instances && a.view_instances == b.view_instances;
}

// ---------------------------------------------------------------------------
// Document form

json param_to_json(const ParamValue& value) {
  return std::visit([](const auto& v) { return json(v); }, value);
}

ParamValue param_from_json(const json& value, std::string_view where) {
  switch (value.type()) {
    case json::value_t::boolean: return value.get<bool>();
    case json::value_t::number_integer: return value.get<std::int64_t>();
    case json::value_t::number_unsigned: return static_cast<std::int64_t>(value.get<std::uint64_t>());
    case json::value_t::number_float: return value.get<double>();
    case json::value_t::string: return value.get<std::string>();
    default:
      throw ParseError(std::string(where) + ": parameter values must be boolean, number or string");
  }
}

json params_to_json(const ParamMap& params) {
  json out = json::object();
  for (const auto& [name, value] : params) out[name] = param_to_json(value);
  return out;
}

ParamMap params_from_json(const json& obj, std::string_view where) {
  if (!obj.is_object()) throw ParseError(std::string(where) + ": params must be an object");
  ParamMap out;
  for (const auto& [name, value] : obj.items()) {
    out.emplace(name, param_from_json(value, std::string(where) + "." + name));
  }
  return out;
}

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(where + ": missing key '" + key + "'");
  }
  return obj.at(key);
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_string() || v.get<std::string>().empty()) {
    throw ParseError(where + "." + key + ": expected a non-empty string");
  }
  return v.get<std::string>();
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& where) {
  std::vector<std::string> out;
  if (!obj.contains(key)) return out;
  const auto& arr = obj.at(key);
  if (!arr.is_array()) throw ParseError(where + "." + key + ": expected an array of strings");
  for (const auto& item : arr) {
    if (!item.is_string()) throw ParseError(where + "." + key + ": expected an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

const json& require_array(const json& doc, const char* key) {
  const auto& v = require(doc, key, "catena");
  if (!v.is_array()) throw ParseError(std::string("catena.") + key + ": expected an array");
  return v;
}

}  // namespace

json to_json(const VisualizationCatena& catena) {
  json doc;
  doc["id"] = catena.id;
  doc["project_id"] = catena.project_id;
  doc["version"] = catena.version;
  doc["data_entries"] = json::array();
  for (const auto& d : catena.data_entries) {
    doc["data_entries"].push_back({{"id", d.id}, {"metric", d.metric_id}});
  }
  doc["function_instances"] = json::array();
  for (const auto& f : catena.function_instances) {
    doc["function_instances"].push_back({{"id", f.id},
                                         {"technique", f.technique_id},
                                         {"params", params_to_json(f.params)},
                                         {"inputs", f.inputs}});
  }
  doc["view_instances"] = json::array();
  for (const auto& v : catena.view_instances) {
    json view{{"id", v.id},
              {"mechanism", std::string(to_string(v.mechanism))},
              {"role", v.role_id},
              {"title", v.title},
              {"inputs", v.inputs}};
    if (!v.layout.empty()) {
      view["layout"] = json::array();
      for (const auto& p : v.layout) view["layout"].push_back({{"source", p.source}, {"label", p.label}});
    }
    if (v.goal_id) view["goal"] = *v.goal_id;
    doc["view_instances"].push_back(std::move(view));
  }
  return doc;
}

VisualizationCatena catena_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("catena: document must be a JSON object");
  VisualizationCatena vc;
  if (doc.contains("id")) vc.id = doc.at("id").get<std::string>();
  if (doc.contains("project_id")) vc.project_id = doc.at("project_id").get<std::string>();
  if (doc.contains("version")) {
    if (!doc.at("version").is_number_unsigned() && !doc.at("version").is_number_integer()) {
      throw ParseError("catena.version: expected a non-negative integer");
    }
    vc.version = doc.at("version").get<std::uint64_t>();
  }

  const auto& entries = require_array(doc, "data_entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "catena.data_entries[" + std::to_string(i) + "]";
    vc.data_entries.push_back({require_string(entries[i], "id", where),
                               require_string(entries[i], "metric", where)});
  }

  const auto& functions = require_array(doc, "function_instances");
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const std::string where = "catena.function_instances[" + std::to_string(i) + "]";
    const auto& f = functions[i];
    FunctionInstance fi;
    fi.id = require_string(f, "id", where);
    fi.technique_id = require_string(f, "technique", where);
    if (f.contains("params")) fi.params = params_from_json(f.at("params"), where + ".params");
    fi.inputs = string_list(f, "inputs", where);
    vc.function_instances.push_back(std::move(fi));
  }

  const auto& views = require_array(doc, "view_instances");
  for (std::size_t i = 0; i < views.size(); ++i) {
    const std::string where = "catena.view_instances[" + std::to_string(i) + "]";
    const auto& v = views[i];
    ViewInstance vi;
    vi.id = require_string(v, "id", where);
    const auto mechanism = require_string(v, "mechanism", where);
    auto parsed = view_mechanism_from_string(mechanism);
    if (!parsed) throw ParseError(where + ".mechanism: unknown view mechanism '" + mechanism + "'");
    vi.mechanism = *parsed;
    vi.role_id = require_string(v, "role", where);
    vi.title = v.contains("title") ? v.at("title").get<std::string>() : vi.id;
    vi.inputs = string_list(v, "inputs", where);
    if (v.contains("layout")) {
      if (!v.at("layout").is_array()) throw ParseError(where + ".layout: expected an array");
      for (const auto& p : v.at("layout")) {
        PanelDescriptor pd;
        pd.source = require_string(p, "source", where + ".layout");
        pd.label = p.contains("label") ? p.at("label").get<std::string>() : pd.source;
        vi.layout.push_back(std::move(pd));
      }
    }
    if (v.contains("goal")) vi.goal_id = v.at("goal").get<std::string>();
    vc.view_instances.push_back(std::move(vi));
  }
  return vc;
}

VisualizationCatena load_catena(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("catena: ") + e.what());
  }
  try {
    return catena_from_json(doc);
  } catch (const json::exception& e) {
    throw ParseError(std::string("catena: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Graph utilities

std::optional<std::vector<std::string>> topological_order(const VisualizationCatena& vc) {
  std::map<std::string, std::size_t> pending;
  std::map<std::string, std::vector<std::string>> consumers;
  for (const auto& f : vc.function_instances) pending[f.id];
  for (const auto& f : vc.function_instances) {
    for (const auto& in : f.inputs) {
      if (!pending.count(in)) continue;  // data entry or unresolved
      ++pending[f.id];
      consumers[in].push_back(f.id);
    }
  }
  std::set<std::string> ready;
  for (const auto& [id, n] : pending) {
    if (n == 0) ready.insert(id);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    auto id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(id);
    for (const auto& c : consumers[id]) {
      if (--pending[c] == 0) ready.insert(c);
    }
  }
  if (order.size() != pending.size()) return std::nullopt;
  return order;
}

bool is_topological_order(const VisualizationCatena& vc, const std::vector<std::string>& order) {
  if (order.size() != vc.function_instances.size()) return false;
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!vc.function(order[i]) || !position.emplace(order[i], i).second) return false;
  }
  for (const auto& f : vc.function_instances) {
    for (const auto& in : f.inputs) {
      auto it = position.find(in);
      if (it != position.end() && it->second >= position[f.id]) return false;
    }
  }
  return true;
}

std::vector<std::string> dependents_of(const VisualizationCatena& vc, std::string_view instance_id) {
  std::set<std::string> found;
  std::vector<std::string> stack{std::string(instance_id)};
  while (!stack.empty()) {
    auto current = stack.back();
    stack.pop_back();
    for (const auto& f : vc.function_instances) {
      if (std::find(f.inputs.begin(), f.inputs.end(), current) != f.inputs.end() &&
          found.insert(f.id).second) {
        stack.push_back(f.id);
      }
    }
  }
  found.erase(std::string(instance_id));
  return {found.begin(), found.end()};
}

namespace {

void collect_upstream(const VisualizationCatena& vc, const std::string& id, std::set<std::string>& functions,
                      std::set<std::string>& entries) {
  if (vc.data_entry(id)) {
    entries.insert(id);
    return;
  }
  const auto* f = vc.function(id);
  if (!f || !functions.insert(id).second) return;
  for (const auto& in : f->inputs) collect_upstream(vc, in, functions, entries);
}

}  // namespace

std::vector<std::string> upstream_of_view(const VisualizationCatena& vc, std::string_view view_id) {
  std::set<std::string> functions, entries;
  if (const auto* v = vc.view(view_id)) {
    for (const auto& in : v->inputs) collect_upstream(vc, in, functions, entries);
  }
  return {functions.begin(), functions.end()};
}

std::vector<std::string> metrics_feeding(const VisualizationCatena& vc, std::string_view instance_id) {
  std::set<std::string> functions, entries;
  collect_upstream(vc, std::string(instance_id), functions, entries);
  std::set<std::string> metrics;
  for (const auto& e : entries) metrics.insert(vc.data_entry(e)->metric_id);
  return {metrics.begin(), metrics.end()};
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::is_valid() const {
  return count(FindingCategory::kDanglingReference) == 0 && count(FindingCategory::kCycle) == 0 &&
         count(FindingCategory::kSchemaViolation) == 0;
}

std::size_t ValidationReport::count(FindingCategory category) const {
  return static_cast<std::size_t>(std::count_if(
      findings.begin(), findings.end(), [&](const CatenaFinding& f) { return f.category == category; }));
}

std::vector<std::string> ValidationReport::lines() const {
  std::vector<std::string> out;
  for (const auto& f : findings) {
    out.push_back(std::string(to_string(f.category)) + " [" + f.subject + "] " + f.message);
  }
  return out;
}

ValidationReport validate_catena(const VisualizationCatena& vc, const TechniqueRegistry& registry,
                                 const GqmPlan& plan, const RoleTable* roles) {
  ValidationReport report;
  auto add = [&](FindingCategory c, const std::string& subject, std::string message) {
    report.findings.push_back({c, subject, std::move(message)});
  };

  std::map<std::string, int> id_counts;
  for (const auto& d : vc.data_entries) ++id_counts[d.id];
  for (const auto& f : vc.function_instances) ++id_counts[f.id];
  for (const auto& v : vc.view_instances) ++id_counts[v.id];
  for (const auto& [id, n] : id_counts) {
    if (n > 1) add(FindingCategory::kDanglingReference, id, "id is used by " + std::to_string(n) + " elements");
  }

  for (const auto& d : vc.data_entries) {
    if (!plan.metric(d.metric_id)) {
      add(FindingCategory::kDanglingReference, d.id, "metric '" + d.metric_id + "' is not in the GQM plan");
    }
  }

  auto kind_of_ref = [&](const std::string& ref) -> std::optional<ValueKind> {
    if (vc.data_entry(ref)) return ValueKind::kRawSeries;
    if (const auto* f = vc.function(ref)) {
      if (const auto* entry = registry.find(f->technique_id)) return entry->descriptor.output;
    }
    return std::nullopt;
  };

  for (const auto& f : vc.function_instances) {
    const auto* entry = registry.find(f.technique_id);
    if (!entry) {
      add(FindingCategory::kDanglingReference, f.id, "technique '" + f.technique_id + "' is not registered");
    }
    for (const auto& in : f.inputs) {
      if (!vc.data_entry(in) && !vc.function(in)) {
        add(FindingCategory::kDanglingReference, f.id, "input '" + in + "' does not resolve");
      }
    }
    if (!entry) continue;
    const auto& desc = entry->descriptor;
    if (f.inputs.size() != desc.inputs.size()) {
      add(FindingCategory::kSchemaViolation, f.id,
          "technique '" + desc.technique_id + "' takes " + std::to_string(desc.inputs.size()) +
              " input(s), got " + std::to_string(f.inputs.size()));
    } else {
      for (std::size_t i = 0; i < f.inputs.size(); ++i) {
        auto kind = kind_of_ref(f.inputs[i]);
        if (!kind) continue;
        const auto& accepted = desc.inputs[i];
        if (std::find(accepted.begin(), accepted.end(), *kind) == accepted.end()) {
          add(FindingCategory::kSchemaViolation, f.id,
              "input '" + f.inputs[i] + "' has kind " + std::string(to_string(*kind)) +
                  " not accepted by '" + desc.technique_id + "'");
        }
      }
    }
    for (const auto& issue : check_params(desc, f.params)) {
      add(FindingCategory::kSchemaViolation, f.id, "parameter '" + issue.param + "': " + issue.reason);
    }
  }

  if (!topological_order(vc)) {
    // Report the instances left over once every acyclic prefix is peeled off.
    auto remaining = vc;
    bool progress = true;
    while (progress) {
      progress = false;
      std::set<std::string> consumed_by_remaining;
      for (const auto& f : remaining.function_instances) {
        for (const auto& in : f.inputs) consumed_by_remaining.insert(in);
      }
      auto& fs = remaining.function_instances;
      auto removable = [&](const FunctionInstance& f) {
        const bool no_fn_inputs = std::none_of(f.inputs.begin(), f.inputs.end(),
                                               [&](const std::string& in) { return remaining.function(in) != nullptr; });
        return no_fn_inputs || !consumed_by_remaining.count(f.id);
      };
      auto it = std::find_if(fs.begin(), fs.end(), removable);
      if (it != fs.end()) {
        fs.erase(it);
        progress = true;
      }
    }
    std::string members;
    for (const auto& f : remaining.function_instances) members += (members.empty() ? "" : ", ") + f.id;
    add(FindingCategory::kCycle, remaining.function_instances.empty() ? vc.id : remaining.function_instances.front().id,
        "reference cycle among: " + members);
  }

  for (const auto& v : vc.view_instances) {
    for (const auto& in : v.inputs) {
      if (vc.data_entry(in)) {
        add(FindingCategory::kSchemaViolation, v.id, "view input '" + in + "' is a data entry; views consume function instances");
      } else if (!vc.function(in)) {
        add(FindingCategory::kDanglingReference, v.id, "input '" + in + "' does not resolve");
      }
    }
    for (const auto& p : v.layout) {
      if (std::find(v.inputs.begin(), v.inputs.end(), p.source) == v.inputs.end()) {
        add(FindingCategory::kSchemaViolation, v.id, "layout panel source '" + p.source + "' is not a view input");
      }
    }
    if (roles && !roles->contains(v.role_id)) {
      add(FindingCategory::kUnresolvedRole, v.id, "role '" + v.role_id + "' is not defined");
    }
  }

  for (const auto& d : vc.data_entries) {
    const bool used = std::any_of(vc.function_instances.begin(), vc.function_instances.end(), [&](const FunctionInstance& f) {
      return std::find(f.inputs.begin(), f.inputs.end(), d.id) != f.inputs.end();
    });
    if (!used) add(FindingCategory::kUnusedDataEntry, d.id, "data entry is consumed by no function instance");
  }

  std::set<std::string> reachable;
  for (const auto& v : vc.view_instances) {
    for (auto& id : upstream_of_view(vc, v.id)) reachable.insert(id);
  }
  for (const auto& f : vc.function_instances) {
    if (!reachable.count(f.id)) add(FindingCategory::kUnusedFunction, f.id, "function instance feeds no view");
  }
  return report;
}

}  // namespace spcc

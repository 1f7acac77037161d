#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spcc/csv.hpp"
#include "spcc/error.hpp"
#include "spcc/service.hpp"

namespace spcc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + p.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

BaselineSet baselines_from(const json& doc) {
  if (doc.is_string()) return parse_baselines_csv(doc.get<std::string>());
  if (!doc.is_array()) throw ParseError("baselines: expected CSV text or an array");
  std::string text = "metric,process_step,planned,unit\n";
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& b = doc[i];
    const std::string where = "baselines[" + std::to_string(i) + "]";
    if (!b.is_object()) throw ParseError(where + ": expected an object");
    for (const char* key : {"metric", "process_step", "unit"}) {
      if (!b.contains(key) || !b.at(key).is_string()) throw ParseError(where + "." + key + ": expected a string");
    }
    if (!b.contains("planned") || !b.at("planned").is_number()) {
      throw ParseError(where + ".planned: expected a number");
    }
    text += csv::join_row({b.at("metric").get<std::string>(), b.at("process_step").get<std::string>(),
                           b.at("planned").dump(), b.at("unit").get<std::string>()});
    text += "\n";
  }
  return parse_baselines_csv(text);
}

const json& require(const json& bundle, const char* key) {
  if (!bundle.contains(key)) throw ParseError(std::string("registration bundle lacks '") + key + "'");
  return bundle.at(key);
}

}  // namespace

ProjectRegistration registration_from_json(std::string_view project_id, const json& bundle) {
  if (!bundle.is_object()) throw ParseError("registration bundle must be a JSON object");
  if (project_id.empty()) throw ParseError("project id must not be empty");
  if (bundle.contains("project_id") && bundle.at("project_id") != json(std::string(project_id))) {
    throw ParseError("bundle project_id does not match '" + std::string(project_id) + "'");
  }
  ProjectRegistration reg;
  reg.project_id = std::string(project_id);
  reg.plan = plan_from_json(require(bundle, "plan"));
  reg.catena = catena_from_json(require(bundle, "catena"));
  reg.catena.project_id = reg.project_id;
  reg.baselines = bundle.contains("baselines") ? baselines_from(bundle.at("baselines")) : BaselineSet{};
  if (bundle.contains("context")) reg.context = context_from_json(bundle.at("context"));
  if (reg.context.project_id.empty()) reg.context.project_id = reg.project_id;
  if (bundle.contains("sources")) reg.sources = sources_from_json(bundle.at("sources"));
  reg.roles = roles_from_json(require(bundle, "roles"));
  if (bundle.contains("tokens")) reg.tokens = tokens_from_json(bundle.at("tokens"), reg.roles);
  if (bundle.contains("subject_groups")) {
    const auto& groups = bundle.at("subject_groups");
    if (!groups.is_object()) throw ParseError("subject_groups: expected an object");
    for (const auto& [subject, group] : groups.items()) {
      if (!group.is_string()) throw ParseError("subject_groups." + subject + ": expected a string");
      reg.groups.assign(subject, group.get<std::string>());
    }
  }
  return reg;
}

json load_bundle_dir(const std::string& dir) {
  const fs::path root(dir);
  json manifest;
  try {
    manifest = json::parse(read_text(root / "project.json"));
  } catch (const json::exception& e) {
    throw ParseError("project.json: " + std::string(e.what()));
  }
  if (!manifest.is_object()) throw ParseError("project.json: expected an object");
  json bundle = manifest;
  for (const char* key : {"plan", "catena", "context", "sources", "roles", "tokens", "subject_groups"}) {
    if (!manifest.contains(key) || !manifest.at(key).is_string()) continue;
    const auto file = root / manifest.at(key).get<std::string>();
    try {
      bundle[key] = json::parse(read_text(file));
    } catch (const json::exception& e) {
      throw ParseError(file.filename().string() + ": " + e.what());
    }
  }
  if (manifest.contains("baselines") && manifest.at("baselines").is_string()) {
    bundle["baselines"] = read_text(root / manifest.at("baselines").get<std::string>());
  }
  return bundle;
}

std::vector<std::string> registration_findings(const ProjectRegistration& reg, const TechniqueRegistry& registry) {
  std::vector<std::string> out;
  const auto report = validate_catena(reg.catena, registry, reg.plan, &reg.roles);
  for (const auto& f : report.findings) {
    switch (f.category) {
      case FindingCategory::kDanglingReference:
      case FindingCategory::kCycle:
      case FindingCategory::kSchemaViolation:
      case FindingCategory::kUnresolvedRole:
        out.push_back(std::string(to_string(f.category)) + " [" + f.subject + "] " + f.message);
        break;
      default:
        break;
    }
  }
  for (auto& line : check_goal_coverage(reg.plan, reg.catena, &reg.roles).lines()) {
    out.push_back("coverage " + line);
  }

  for (const auto& [id, b] : reg.baselines) {
    const Metric* m = reg.plan.metric(b.metric_id);
    if (!m) {
      out.push_back("baseline [" + id + "] metric '" + b.metric_id + "' is not in the GQM plan");
      continue;
    }
    if (m->unit != b.unit) {
      out.push_back("baseline [" + id + "] unit '" + b.unit + "' differs from metric unit '" + m->unit + "'");
    }
    for (const auto& p : b.points) {
      if (!reg.plan.steps.contains(p.step_path)) {
        out.push_back("baseline [" + id + "] step '" + p.step_path + "' is not in the process step tree");
      }
    }
  }
  for (const auto& f : reg.catena.function_instances) {
    const auto* entry = registry.find(f.technique_id);
    if (!entry) continue;
    for (const auto& spec : entry->descriptor.params) {
      if (spec.type != ParamType::kBaselineRef) continue;
      auto it = f.params.find(spec.name);
      if (it == f.params.end()) continue;
      const auto* ref = std::get_if<std::string>(&it->second);
      if (ref && !reg.baselines.count(*ref)) {
        out.push_back("baseline [" + f.id + "] parameter '" + spec.name + "' names unknown baseline '" + *ref + "'");
      }
    }
  }
  return out;
}

}  // namespace spcc

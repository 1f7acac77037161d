#include "spcc/gqm_plan.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "spcc/access_control.hpp"
#include "spcc/catena.hpp"
#include "spcc/error.hpp"

namespace spcc {

using nlohmann::json;

namespace {

constexpr std::string_view kAnalyze = "Analyze ";
constexpr std::string_view kPurpose = " for the purpose of ";
constexpr std::string_view kFocus = " with respect to ";
constexpr std::string_view kViewpoint = " from the viewpoint of the ";
constexpr std::string_view kContext = " in the context of ";

}  // namespace

std::string MeasurementGoal::render() const {
  std::string out(kAnalyze);
  out += object;
  out += kPurpose;
  out += purpose;
  if (quality_focus) {
    out += kFocus;
    out += *quality_focus;
  }
  out += kViewpoint;
  out += viewpoint;
  out += kContext;
  out += context;
  return out;
}

MeasurementGoal formulate_goal(std::string object, std::string purpose, std::string viewpoint,
                               std::string context, std::optional<std::string> quality_focus,
                               std::string goal_id) {
  if (object.empty()) throw EmptyField("goal object must not be empty");
  if (purpose.empty()) throw EmptyField("goal purpose must not be empty");
  if (viewpoint.empty()) throw EmptyField("goal viewpoint must not be empty");
  if (context.empty()) throw EmptyField("goal context must not be empty");
  if (quality_focus && quality_focus->empty()) throw EmptyField("goal quality focus must not be empty");
  return MeasurementGoal{std::move(goal_id), std::move(object), std::move(purpose), std::move(viewpoint),
                         std::move(context), std::move(quality_focus)};
}

std::optional<MeasurementGoal> parse_goal_sentence(std::string_view sentence) {
  if (sentence.substr(0, kAnalyze.size()) != kAnalyze) return std::nullopt;
  std::string_view rest = sentence.substr(kAnalyze.size());

  auto take_until = [&rest](std::string_view delim) -> std::optional<std::string> {
    auto pos = rest.find(delim);
    if (pos == std::string_view::npos) return std::nullopt;
    std::string field(rest.substr(0, pos));
    rest.remove_prefix(pos + delim.size());
    return field;
  };

  auto object = take_until(kPurpose);
  if (!object) return std::nullopt;
  auto purpose = take_until(kViewpoint);
  if (!purpose) return std::nullopt;
  std::optional<std::string> focus;
  if (auto pos = purpose->find(kFocus); pos != std::string::npos) {
    focus = purpose->substr(pos + kFocus.size());
    purpose->resize(pos);
  }
  auto viewpoint = take_until(kContext);
  if (!viewpoint) return std::nullopt;
  try {
    return formulate_goal(*object, *purpose, *viewpoint, std::string(rest), focus);
  } catch (const EmptyField&) {
    return std::nullopt;
  }
}

std::string_view to_string(MetricScale scale) {
  switch (scale) {
    case MetricScale::kRatio: return "ratio";
    case MetricScale::kInterval: return "interval";
    case MetricScale::kOrdinal: return "ordinal-as-int";
  }
  return "unknown";
}

std::string_view to_string(CollectionFrequency frequency) {
  switch (frequency) {
    case CollectionFrequency::kPerEvent: return "per-event";
    case CollectionFrequency::kDaily: return "daily";
    case CollectionFrequency::kPerPhase: return "per-phase";
  }
  return "unknown";
}

namespace {

MetricScale scale_from(const std::string& s, const std::string& where) {
  for (auto v : {MetricScale::kRatio, MetricScale::kInterval, MetricScale::kOrdinal}) {
    if (to_string(v) == s) return v;
  }
  throw ParseError(where + ": unknown scale '" + s + "'");
}

CollectionFrequency frequency_from(const std::string& s, const std::string& where) {
  for (auto v : {CollectionFrequency::kPerEvent, CollectionFrequency::kDaily, CollectionFrequency::kPerPhase}) {
    if (to_string(v) == s) return v;
  }
  throw ParseError(where + ": unknown frequency '" + s + "'");
}

std::string str(const json& obj, const char* key, const std::string& where, bool required = true) {
  if (!obj.contains(key)) {
    if (required) throw ParseError(where + ": missing key '" + key + "'");
    return {};
  }
  if (!obj.at(key).is_string()) throw ParseError(where + "." + key + ": expected a string");
  return obj.at(key).get<std::string>();
}

std::vector<std::string> strs(const json& obj, const char* key, const std::string& where) {
  std::vector<std::string> out;
  if (!obj.contains(key)) return out;
  if (!obj.at(key).is_array()) throw ParseError(where + "." + key + ": expected an array");
  for (const auto& v : obj.at(key)) {
    if (!v.is_string()) throw ParseError(where + "." + key + ": expected strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

const MeasurementGoal* GqmPlan::goal(std::string_view goal_id) const {
  for (const auto& g : goals) {
    if (g.goal_id == goal_id) return &g;
  }
  return nullptr;
}

const Metric* GqmPlan::metric(std::string_view metric_id) const {
  for (const auto& m : metrics) {
    if (m.metric_id == metric_id) return &m;
  }
  return nullptr;
}

GqmPlan plan_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("plan: document must be a JSON object");
  GqmPlan plan;
  for (const auto& step : strs(doc, "process_steps", "plan")) plan.steps.add(step);

  if (doc.contains("goals") && !doc.at("goals").is_array()) throw ParseError("plan.goals: expected an array");
  std::set<std::string> goal_ids;
  for (const auto& g : doc.value("goals", json::array())) {
    const std::string where = "plan.goals[" + std::to_string(plan.goals.size()) + "]";
    std::optional<std::string> focus;
    if (g.contains("quality_focus")) focus = str(g, "quality_focus", where);
    auto goal = formulate_goal(str(g, "object", where), str(g, "purpose", where), str(g, "viewpoint", where),
                               str(g, "context", where), focus, str(g, "id", where));
    if (goal.goal_id.empty() || !goal_ids.insert(goal.goal_id).second) {
      throw ParseError(where + ": goal id missing or duplicated");
    }
    plan.goals.push_back(std::move(goal));
  }

  if (doc.contains("metrics") && !doc.at("metrics").is_array()) throw ParseError("plan.metrics: expected an array");
  std::set<std::string> metric_ids;
  for (const auto& m : doc.value("metrics", json::array())) {
    const std::string where = "plan.metrics[" + std::to_string(plan.metrics.size()) + "]";
    Metric metric;
    metric.metric_id = str(m, "id", where);
    if (metric.metric_id.empty() || !metric_ids.insert(metric.metric_id).second) {
      throw ParseError(where + ": metric id missing or duplicated");
    }
    metric.name = str(m, "name", where, false);
    if (metric.name.empty()) metric.name = metric.metric_id;
    metric.unit = str(m, "unit", where);
    if (!m.contains("min") || !m.contains("max") || !m.at("min").is_number() || !m.at("max").is_number()) {
      throw ParseError(where + ": numeric 'min' and 'max' required");
    }
    metric.min = m.at("min").get<double>();
    metric.max = m.at("max").get<double>();
    if (!(metric.min < metric.max)) throw ParseError(where + ": value domain requires min < max");
    metric.scale = scale_from(m.value("scale", std::string("ratio")), where);
    metric.goal_ids = strs(m, "goals", where);
    if (metric.goal_ids.empty()) throw ParseError(where + ": metric must trace to at least one goal");
    for (const auto& gid : metric.goal_ids) {
      if (!goal_ids.count(gid)) throw ParseError(where + ": unknown goal '" + gid + "'");
    }
    metric.questions = strs(m, "questions", where);
    metric.collected_at = strs(m, "collected_at", where);
    for (const auto& step : metric.collected_at) {
      if (!plan.steps.contains(step)) throw ParseError(where + ": step '" + step + "' is not a process step");
    }
    metric.collector_role = str(m, "collector_role", where, false);
    metric.frequency = frequency_from(m.value("frequency", std::string("per-event")), where);
    plan.metrics.push_back(std::move(metric));
  }

  for (const auto& s : doc.value("sheets", json::array())) {
    const std::string where = "plan.sheets[" + std::to_string(plan.sheets.size()) + "]";
    DataCollectionSheet sheet;
    sheet.sheet_id = str(s, "id", where);
    sheet.step_path = str(s, "process_step", where);
    if (!plan.steps.contains(sheet.step_path)) {
      throw ParseError(where + ": step '" + sheet.step_path + "' is not a process step");
    }
    sheet.metric_ids = strs(s, "metrics", where);
    if (sheet.metric_ids.empty()) throw ParseError(where + ": sheet must list at least one metric");
    for (const auto& mid : sheet.metric_ids) {
      if (!metric_ids.count(mid)) throw ParseError(where + ": unknown metric '" + mid + "'");
    }
    sheet.collector_role = str(s, "collector_role", where, false);
    sheet.frequency = frequency_from(s.value("frequency", std::string("per-event")), where);
    plan.sheets.push_back(std::move(sheet));
  }
  return plan;
}

GqmPlan load_plan(std::string_view text) {
  try {
    return plan_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("plan: ") + e.what());
  }
}

json to_json(const GqmPlan& plan) {
  json doc;
  doc["goals"] = json::array();
  for (const auto& g : plan.goals) {
    json goal{{"id", g.goal_id}, {"object", g.object}, {"purpose", g.purpose},
              {"viewpoint", g.viewpoint}, {"context", g.context}};
    if (g.quality_focus) goal["quality_focus"] = *g.quality_focus;
    doc["goals"].push_back(std::move(goal));
  }
  doc["metrics"] = json::array();
  for (const auto& m : plan.metrics) {
    doc["metrics"].push_back({{"id", m.metric_id},
                              {"name", m.name},
                              {"unit", m.unit},
                              {"min", m.min},
                              {"max", m.max},
                              {"scale", std::string(to_string(m.scale))},
                              {"goals", m.goal_ids},
                              {"questions", m.questions},
                              {"collected_at", m.collected_at},
                              {"collector_role", m.collector_role},
                              {"frequency", std::string(to_string(m.frequency))}});
  }
  doc["sheets"] = json::array();
  for (const auto& s : plan.sheets) {
    doc["sheets"].push_back({{"id", s.sheet_id},
                             {"process_step", s.step_path},
                             {"metrics", s.metric_ids},
                             {"collector_role", s.collector_role},
                             {"frequency", std::string(to_string(s.frequency))}});
  }
  doc["process_steps"] = json::array();
  for (const auto& p : plan.steps.paths()) {
    if (p != "/") doc["process_steps"].push_back(p);
  }
  return doc;
}

std::vector<DataCollectionSheet> derive_collection_plan(const GqmPlan& plan) {
  if (plan.goals.empty() || plan.metrics.empty()) {
    throw PreconditionViolation("collection plan needs at least one goal and one metric");
  }
  std::map<std::string, std::set<std::string>> by_step;
  std::vector<std::string> uncovered;
  for (const auto& m : plan.metrics) {
    bool covered = false;
    for (const auto& step : m.collected_at) {
      if (!plan.steps.contains(step)) continue;
      by_step[step].insert(m.metric_id);
      covered = true;
    }
    if (!covered) uncovered.push_back(m.metric_id);
  }
  if (!uncovered.empty()) {
    std::sort(uncovered.begin(), uncovered.end());
    throw UncoveredMetric(uncovered);
  }
  std::vector<DataCollectionSheet> sheets;
  for (const auto& [step, metric_ids] : by_step) {
    DataCollectionSheet sheet;
    sheet.sheet_id = "sheet:" + step;
    sheet.step_path = step;
    sheet.metric_ids.assign(metric_ids.begin(), metric_ids.end());
    const auto* first = plan.metric(sheet.metric_ids.front());
    sheet.collector_role = first->collector_role;
    sheet.frequency = first->frequency;
    sheets.push_back(std::move(sheet));
  }
  return sheets;
}

bool CoverageReport::empty() const {
  return unconsumed_metrics.empty() && untraceable_views.empty() && unsupported_goals.empty() &&
         unknown_metrics.empty();
}

std::vector<std::string> CoverageReport::lines() const {
  std::vector<std::string> out;
  for (const auto& m : unconsumed_metrics) out.push_back("metric '" + m + "' is collected but consumed by no function instance");
  for (const auto& v : untraceable_views) out.push_back("view '" + v + "' traces to no measurement goal");
  for (const auto& g : unsupported_goals) out.push_back("goal '" + g + "' is supported by no view");
  for (const auto& m : unknown_metrics) out.push_back("catena metric '" + m + "' is not in the GQM plan");
  return out;
}

bool view_traces_to_goal(const GqmPlan& /*plan*/, const MeasurementGoal& goal, std::string_view role_id,
                         const std::optional<std::string>& goal_annotation, const RoleTable* roles) {
  if (goal_annotation) return *goal_annotation == goal.goal_id;
  if (role_id == goal.viewpoint) return true;
  if (roles) {
    if (const auto* role = roles->find(role_id)) return role->title == goal.viewpoint;
  }
  return false;
}

CoverageReport check_goal_coverage(const GqmPlan& plan, const VisualizationCatena& vc, const RoleTable* roles) {
  CoverageReport report;

  std::set<std::string> consumed_metrics;
  for (const auto& f : vc.function_instances) {
    for (const auto& in : f.inputs) {
      if (const auto* d = vc.data_entry(in)) consumed_metrics.insert(d->metric_id);
    }
  }
  for (const auto& m : plan.metrics) {
    if (!consumed_metrics.count(m.metric_id)) report.unconsumed_metrics.push_back(m.metric_id);
  }
  std::set<std::string> unknown;
  for (const auto& d : vc.data_entries) {
    if (!plan.metric(d.metric_id)) unknown.insert(d.metric_id);
  }
  report.unknown_metrics.assign(unknown.begin(), unknown.end());

  std::set<std::string> supported;
  for (const auto& v : vc.view_instances) {
    bool traced = false;
    for (const auto& g : plan.goals) {
      if (view_traces_to_goal(plan, g, v.role_id, v.goal_id, roles)) {
        traced = true;
        supported.insert(g.goal_id);
      }
    }
    if (!traced) report.untraceable_views.push_back(v.id);
  }
  for (const auto& g : plan.goals) {
    if (!supported.count(g.goal_id)) report.unsupported_goals.push_back(g.goal_id);
  }
  std::sort(report.unconsumed_metrics.begin(), report.unconsumed_metrics.end());
  std::sort(report.untraceable_views.begin(), report.untraceable_views.end());
  std::sort(report.unsupported_goals.begin(), report.unsupported_goals.end());
  return report;
}

}  // namespace spcc

#include <cmath>

#include <nlohmann/json.hpp>

#include "spcc/engine.hpp"
#include "spcc/timestamp.hpp"

namespace spcc {

namespace {

using nlohmann::json;

void put(std::map<std::string, double>& values, const char* name, const std::optional<double>& v) {
  if (v) values[name] = *v;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void fill_rows(ViewPanel& panel, const RawSeries& s) {
  for (const auto& p : s.points) {
    ViewRow row{p.step_path, p.subject_id, {}, {}};
    row.values["timestamp"] = static_cast<double>(p.timestamp);
    row.values["value"] = p.value;
    panel.rows.push_back(std::move(row));
  }
}

void fill_rows(ViewPanel& panel, const Summary& s) {
  ViewRow row;
  row.values["count"] = static_cast<double>(s.count);
  put(row.values, "min", s.min);
  put(row.values, "max", s.max);
  put(row.values, "mean", s.mean);
  put(row.values, "last", s.last);
  put(row.values, "cumulative", s.cumulative);
  panel.rows.push_back(std::move(row));
}

void fill_rows(ViewPanel& panel, const DeviationSeries& s) {
  for (const auto& p : s.points) {
    ViewRow row{p.step_path, p.subject_id, {}, std::string(to_string(p.flag))};
    put(row.values, "actual", p.actual);
    put(row.values, "planned", p.planned);
    put(row.values, "deviation_abs", p.deviation_abs);
    put(row.values, "deviation_rel", p.deviation_rel);
    ++panel.status_counts[row.status];
    panel.rows.push_back(std::move(row));
  }
}

void fill_rows(ViewPanel& panel, const ClassifiedSeries& s) {
  panel.meta["warn_threshold"] = s.tolerance.warn_threshold;
  panel.meta["violation_threshold"] = s.tolerance.violation_threshold;
  for (const auto& p : s.points) {
    ViewRow row{p.step_path, p.subject_id, {}, std::string(to_string(p.status))};
    row.values["actual"] = p.actual;
    put(row.values, "planned", p.planned);
    put(row.values, "deviation", p.deviation);
    ++panel.status_counts[row.status];
    panel.rows.push_back(std::move(row));
  }
}

void fill_rows(ViewPanel& panel, const ForecastSeries& s) {
  panel.meta["slope"] = s.slope;
  panel.meta["intercept"] = s.intercept;
  panel.meta["residual_ss"] = s.residual_ss;
  for (const auto& p : s.horizon) {
    ViewRow row{format_iso8601(static_cast<Timestamp>(std::llround(p.t))), {}, {}, {}};
    row.values["t"] = p.t;
    row.values["value"] = p.value;
    panel.rows.push_back(std::move(row));
  }
}

void fill_rows(ViewPanel& panel, const RolledUpSeries& s) {
  for (const auto& p : s.points) {
    ViewRow row{p.step_path, p.subject_id, {}, {}};
    row.values["value"] = p.value;
    row.values["count"] = static_cast<double>(p.count);
    panel.rows.push_back(std::move(row));
  }
}

json point_json(const MeasurementPoint& p) {
  return {{"timestamp", format_iso8601(p.timestamp)}, {"process_step", p.step_path}, {"subject", p.subject_id},
          {"value", p.value}, {"unit", p.unit}, {"source", p.source_id}};
}

}  // namespace

ViewModel render_view(const ViewInstance& view, const std::map<std::string, InstanceOutcome, std::less<>>& outcomes,
                      std::uint64_t snapshot_version, std::uint64_t catena_version) {
  ViewModel vm;
  vm.view_id = view.id;
  vm.title = view.title;
  vm.mechanism = std::string(to_string(view.mechanism));
  vm.role_id = view.role_id;
  vm.snapshot_version = snapshot_version;
  vm.catena_version = catena_version;

  std::vector<PanelDescriptor> layout = view.layout;
  if (layout.empty()) {
    for (const auto& in : view.inputs) layout.push_back({in, in});
  }
  for (const auto& d : layout) {
    ViewPanel panel;
    panel.source = d.source;
    panel.label = d.label.empty() ? d.source : d.label;
    auto it = outcomes.find(d.source);
    if (it == outcomes.end()) {
      panel.state = "failed";
      panel.error = "source '" + d.source + "' is not a function instance";
    } else {
      panel.state = std::string(to_string(it->second.state));
      panel.error = it->second.error;
      if (it->second.value) {
        panel.kind = std::string(to_string(kind_of(*it->second.value)));
        std::visit([&](const auto& v) { fill_rows(panel, v); }, *it->second.value);
      }
    }
    vm.panels.push_back(std::move(panel));
  }
  return vm;
}

nlohmann::json to_json(const ViewModel& view) {
  json panels = json::array();
  for (const auto& p : view.panels) {
    json rows = json::array();
    for (const auto& r : p.rows) {
      rows.push_back({{"key", r.key}, {"subject", r.subject_id}, {"values", r.values}, {"status", r.status}});
    }
    json panel = {{"source", p.source}, {"label", p.label}, {"kind", p.kind},          {"state", p.state},
                  {"rows", rows},       {"status_counts", p.status_counts}, {"meta", p.meta}};
    if (!p.error.empty()) panel["error"] = p.error;
    panels.push_back(std::move(panel));
  }
  return {{"view_id", view.view_id},
          {"title", view.title},
          {"mechanism", view.mechanism},
          {"role", view.role_id},
          {"snapshot_version", view.snapshot_version},
          {"catena_version", view.catena_version},
          {"drill_path", view.drill_path},
          {"panels", panels}};
}

nlohmann::json to_json(const Value& value) {
  json out = {{"kind", to_string(kind_of(value))}};
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, RawSeries>) {
          out["metric"] = v.metric_id;
          out["unit"] = v.unit;
          json pts = json::array();
          for (const auto& p : v.points) pts.push_back(point_json(p));
          out["points"] = pts;
        } else if constexpr (std::is_same_v<T, Summary>) {
          out["count"] = v.count;
          out["min"] = optional_number(v.min);
          out["max"] = optional_number(v.max);
          out["mean"] = optional_number(v.mean);
          out["last"] = optional_number(v.last);
          out["cumulative"] = optional_number(v.cumulative);
        } else if constexpr (std::is_same_v<T, DeviationSeries>) {
          out["baseline"] = v.baseline_id;
          out["unit"] = v.unit;
          json pts = json::array();
          for (const auto& p : v.points) {
            pts.push_back({{"process_step", p.step_path},
                           {"subject", p.subject_id},
                           {"actual", optional_number(p.actual)},
                           {"planned", optional_number(p.planned)},
                           {"deviation_abs", optional_number(p.deviation_abs)},
                           {"deviation_rel", optional_number(p.deviation_rel)},
                           {"flag", to_string(p.flag)}});
          }
          out["points"] = pts;
        } else if constexpr (std::is_same_v<T, ClassifiedSeries>) {
          out["baseline"] = v.baseline_id;
          out["unit"] = v.unit;
          out["tolerance"] = {{"mode", v.tolerance.mode == ToleranceMode::kRelative ? "relative" : "absolute"},
                              {"warn", v.tolerance.warn_threshold},
                              {"violation", v.tolerance.violation_threshold}};
          json pts = json::array();
          for (const auto& p : v.points) {
            pts.push_back({{"process_step", p.step_path},
                           {"subject", p.subject_id},
                           {"actual", p.actual},
                           {"planned", optional_number(p.planned)},
                           {"deviation", optional_number(p.deviation)},
                           {"status", to_string(p.status)}});
          }
          out["points"] = pts;
        } else if constexpr (std::is_same_v<T, ForecastSeries>) {
          out["model"] = to_string(v.model);
          out["slope"] = v.slope;
          out["intercept"] = v.intercept;
          out["residual_ss"] = v.residual_ss;
          json pts = json::array();
          for (const auto& p : v.horizon) pts.push_back({{"t", p.t}, {"value", p.value}});
          out["horizon"] = pts;
        } else {
          out["metric"] = v.metric_id;
          out["unit"] = v.unit;
          out["reducer"] = to_string(v.reducer);
          json pts = json::array();
          for (const auto& p : v.points) {
            pts.push_back({{"process_step", p.step_path},
                           {"subject", p.subject_id},
                           {"value", p.value},
                           {"count", p.count}});
          }
          out["points"] = pts;
        }
      },
      value);
  return out;
}

nlohmann::json to_json(const CatenaResult& result) {
  json functions = json::object();
  for (const auto& [id, o] : result.functions) {
    json f = {{"state", to_string(o.state)}};
    if (!o.error.empty()) f["error"] = o.error;
    if (o.value) f["value"] = to_json(*o.value);
    functions[id] = std::move(f);
  }
  json views = json::object();
  for (const auto& [id, v] : result.views) views[id] = to_json(v);
  return {{"snapshot_version", result.snapshot_version},
          {"catena_version", result.catena_version},
          {"evaluated_at", format_iso8601(result.evaluated_at)},
          {"functions", functions},
          {"views", views}};
}

}  // namespace spcc

#include <algorithm>
#include <map>

#include "spcc/error.hpp"
#include "spcc/technique_registry.hpp"

namespace spcc {
namespace {

constexpr auto kRaw = ValueKind::kRawSeries;
constexpr auto kRolled = ValueKind::kRolledUpSeries;

const Baseline& baseline_param(const TechniqueContext& ctx) {
  const auto& id = string_param(ctx.params, "baseline");
  auto it = ctx.snapshot.baselines.find(id);
  if (it == ctx.snapshot.baselines.end()) {
    throw PreconditionViolation("unknown baseline '" + id + "'");
  }
  return it->second;
}

ToleranceSpec tolerance_param(const ParamMap& params) {
  ToleranceSpec tol;
  tol.mode = string_param(params, "mode") == "absolute" ? ToleranceMode::kAbsolute
                                                        : ToleranceMode::kRelative;
  tol.warn_threshold = number_param(params, "warn");
  tol.violation_threshold = number_param(params, "violation");
  return tol;
}

Value eval_monitor(const TechniqueContext& ctx) {
  std::vector<double> values;
  const Value& in = *ctx.inputs[0];
  if (const auto* raw = std::get_if<RawSeries>(&in)) {
    for (const auto& p : raw->points) values.push_back(p.value);
  } else if (const auto* rolled = std::get_if<RolledUpSeries>(&in)) {
    for (const auto& p : rolled->points) values.push_back(p.value);
  }
  return monitor(values);
}

Value eval_compare(const TechniqueContext& ctx) {
  return compare_to_baseline(actuals_from(*ctx.inputs[0]), baseline_param(ctx));
}

Value eval_tolerance(const TechniqueContext& ctx) {
  return tolerance_range_check(actuals_from(*ctx.inputs[0]), baseline_param(ctx),
                               tolerance_param(ctx.params));
}

Value eval_predict(const TechniqueContext& ctx) {
  const auto& raw = std::get<RawSeries>(*ctx.inputs[0]);
  const bool cumulative = bool_param(ctx.params, "cumulative");
  // One value per timestamp: the total over all steps and subjects.
  std::map<Timestamp, double> per_time;
  for (const auto& p : raw.points) per_time[p.timestamp] += p.value;
  std::vector<TimedValue> series;
  double running = 0.0;
  for (const auto& [t, v] : per_time) {
    running += v;
    series.push_back({static_cast<double>(t), cumulative ? running : v});
  }
  const auto model = forecast_model_from_string(string_param(ctx.params, "model"));
  return predict_course(series, static_cast<int>(integer_param(ctx.params, "horizon")), *model);
}

Value eval_aggregate(const TechniqueContext& ctx) {
  const auto& raw = std::get<RawSeries>(*ctx.inputs[0]);
  AggregationLevel level;
  level.depth = static_cast<std::size_t>(integer_param(ctx.params, "depth"));
  level.under = string_param(ctx.params, "under");
  auto out = aggregate(raw.points, level, *reducer_from_string(string_param(ctx.params, "reducer")),
                       bool_param(ctx.params, "by_subject"), &ctx.snapshot.steps);
  out.metric_id = raw.metric_id;
  if (out.unit.empty() && out.reducer != Reducer::kCount) out.unit = raw.unit;
  return out;
}

ParamSpec make_spec(std::string name, ParamType type) {
  ParamSpec p;
  p.name = std::move(name);
  p.type = type;
  return p;
}

ParamSpec baseline_spec() {
  ParamSpec p = make_spec("baseline", ParamType::kBaselineRef);
  p.required = true;
  p.project_bound = true;
  return p;
}

ParamSpec threshold_spec(std::string name) {
  ParamSpec p = make_spec(std::move(name), ParamType::kNumber);
  p.required = true;
  p.min = 0.0;
  p.project_bound = true;
  return p;
}

}  // namespace

TechniqueRegistry TechniqueRegistry::with_builtins() {
  TechniqueRegistry r;

  r.register_technique({"monitor", TechniquePurpose::kMonitor, {}, {{kRaw, kRolled}}, ValueKind::kSummary, {}},
                       eval_monitor);

  r.register_technique({"compare_to_baseline", TechniquePurpose::kCompare, {baseline_spec()},
                        {{kRaw, kRolled}}, ValueKind::kDeviationSeries, {}},
                       eval_compare);

  {
    ParamSpec mode = make_spec("mode", ParamType::kEnum);
    mode.default_value = std::string("relative");
    mode.choices = {"relative", "absolute"};
    TechniqueDescriptor d{"tolerance_range_check",
                          TechniquePurpose::kCheck,
                          {baseline_spec(), mode, threshold_spec("warn"), threshold_spec("violation")},
                          {{kRaw, kRolled}},
                          ValueKind::kClassifiedSeries,
                          [](const ParamMap& params) { tolerance_param(params).validate(); }};
    r.register_technique(std::move(d), eval_tolerance);
  }

  {
    ParamSpec horizon = make_spec("horizon", ParamType::kInteger);
    horizon.default_value = std::int64_t{3};
    horizon.min = 1;
    ParamSpec model = make_spec("model", ParamType::kEnum);
    model.default_value = std::string("linear-least-squares");
    model.choices = {"linear-least-squares", "last-value-hold"};
    ParamSpec cumulative = make_spec("cumulative", ParamType::kBoolean);
    cumulative.default_value = false;
    r.register_technique({"predict_course", TechniquePurpose::kPredict, {horizon, model, cumulative},
                          {{kRaw}}, ValueKind::kForecastSeries, {}},
                         eval_predict);
  }

  {
    ParamSpec depth = make_spec("depth", ParamType::kInteger);
    depth.required = true;
    depth.min = 0;
    ParamSpec under = make_spec("under", ParamType::kStepPath);
    under.default_value = std::string("/");
    ParamSpec reducer = make_spec("reducer", ParamType::kEnum);
    reducer.default_value = std::string("sum");
    reducer.choices = {"sum", "mean", "count"};
    ParamSpec by_subject = make_spec("by_subject", ParamType::kBoolean);
    by_subject.default_value = false;
    r.register_technique({"aggregate", TechniquePurpose::kAggregate, {depth, under, reducer, by_subject},
                          {{kRaw}}, ValueKind::kRolledUpSeries, {}},
                         eval_aggregate);
  }
  return r;
}

}  // namespace spcc

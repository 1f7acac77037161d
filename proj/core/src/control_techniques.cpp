#include "spcc/control_techniques.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "spcc/error.hpp"

namespace spcc {

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::kRawSeries: return "data-entry";
    case ValueKind::kSummary: return "summary";
    case ValueKind::kDeviationSeries: return "deviation-series";
    case ValueKind::kClassifiedSeries: return "classified-series";
    case ValueKind::kForecastSeries: return "forecast-series";
    case ValueKind::kRolledUpSeries: return "rolled-up-series";
  }
  return "unknown";
}

std::optional<ValueKind> value_kind_from_string(std::string_view text) {
  for (auto k : {ValueKind::kRawSeries, ValueKind::kSummary, ValueKind::kDeviationSeries,
                 ValueKind::kClassifiedSeries, ValueKind::kForecastSeries,
                 ValueKind::kRolledUpSeries}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(DeviationFlag flag) {
  switch (flag) {
    case DeviationFlag::kOk: return "OK";
    case DeviationFlag::kUndefinedRel: return "UNDEFINED_REL";
    case DeviationFlag::kMissingActual: return "MISSING_ACTUAL";
    case DeviationFlag::kNoBaseline: return "NO_BASELINE";
  }
  return "UNKNOWN";
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::kOk: return "OK";
    case Status::kWarn: return "WARN";
    case Status::kViolation: return "VIOLATION";
    case Status::kNoBaseline: return "NO_BASELINE";
  }
  return "UNKNOWN";
}

std::optional<Status> status_from_string(std::string_view text) {
  for (auto s : {Status::kOk, Status::kWarn, Status::kViolation, Status::kNoBaseline}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::string_view to_string(ForecastModel model) {
  return model == ForecastModel::kLinearLeastSquares ? "linear-least-squares" : "last-value-hold";
}

std::optional<ForecastModel> forecast_model_from_string(std::string_view text) {
  if (text == "linear-least-squares") return ForecastModel::kLinearLeastSquares;
  if (text == "last-value-hold") return ForecastModel::kLastValueHold;
  return std::nullopt;
}

std::string_view to_string(Reducer reducer) {
  switch (reducer) {
    case Reducer::kSum: return "sum";
    case Reducer::kMean: return "mean";
    case Reducer::kCount: return "count";
  }
  return "unknown";
}

std::optional<Reducer> reducer_from_string(std::string_view text) {
  if (text == "sum") return Reducer::kSum;
  if (text == "mean") return Reducer::kMean;
  if (text == "count") return Reducer::kCount;
  return std::nullopt;
}

ValueKind kind_of(const Value& value) { return static_cast<ValueKind>(value.index()); }

void ToleranceSpec::validate() const {
  if (!std::isfinite(warn_threshold) || warn_threshold < 0.0) {
    throw SchemaViolation("warn", "must be a non-negative number");
  }
  if (!std::isfinite(violation_threshold) || violation_threshold < 0.0) {
    throw SchemaViolation("violation", "must be a non-negative number");
  }
  if (warn_threshold > violation_threshold) {
    throw SchemaViolation("warn", "must not exceed the violation threshold");
  }
}

ActualSeries actuals_from(const Value& value) {
  ActualSeries out;
  if (const auto* raw = std::get_if<RawSeries>(&value)) {
    out.unit = raw->unit;
    std::map<std::pair<std::string, std::string>, double> sums;
    for (const auto& p : raw->points) sums[{p.step_path, p.subject_id}] += p.value;
    for (const auto& [key, v] : sums) out.points.push_back({key.first, key.second, v});
    return out;
  }
  if (const auto* rolled = std::get_if<RolledUpSeries>(&value)) {
    out.unit = rolled->unit;
    for (const auto& p : rolled->points) out.points.push_back({p.step_path, p.subject_id, p.value});
    return out;
  }
  throw PreconditionViolation("actual values must come from a data entry or a rolled-up series, got " +
                              std::string(to_string(kind_of(value))));
}

Summary monitor(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double lo = values.front();
  double hi = values.front();
  double total = 0.0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    total += v;
  }
  s.min = lo;
  s.max = hi;
  s.cumulative = total;
  s.mean = total / static_cast<double>(values.size());
  s.last = values.back();
  return s;
}

namespace {

void check_units(const ActualSeries& actual, const Baseline& baseline) {
  if (!actual.points.empty() && !actual.unit.empty() && actual.unit != baseline.unit) {
    throw UnitMismatch("actual unit '" + actual.unit + "' does not match baseline '" +
                       baseline.baseline_id + "' unit '" + baseline.unit + "'");
  }
}

}  // namespace

DeviationSeries compare_to_baseline(const ActualSeries& actual, const Baseline& baseline) {
  check_units(actual, baseline);
  DeviationSeries out;
  out.baseline_id = baseline.baseline_id;
  out.unit = baseline.unit;

  std::map<std::pair<std::string, std::string>, DeviationPoint> points;
  for (const auto& a : actual.points) {
    DeviationPoint p;
    p.step_path = a.step_path;
    p.subject_id = a.subject_id;
    p.actual = a.value;
    if (const auto* planned = baseline.find(a.step_path)) {
      p.planned = planned->planned;
      p.deviation_abs = a.value - planned->planned;
      if (planned->planned != 0.0) {
        p.deviation_rel = *p.deviation_abs / planned->planned;
        p.flag = DeviationFlag::kOk;
      } else {
        p.flag = DeviationFlag::kUndefinedRel;
      }
    } else {
      p.flag = DeviationFlag::kNoBaseline;
    }
    points[{p.step_path, p.subject_id}] = std::move(p);
  }
  for (const auto& b : baseline.points) {
    const bool present = std::any_of(actual.points.begin(), actual.points.end(),
                                     [&](const ActualPoint& a) { return a.step_path == b.step_path; });
    if (present) continue;
    DeviationPoint p;
    p.step_path = b.step_path;
    p.planned = b.planned;
    p.flag = DeviationFlag::kMissingActual;
    points[{p.step_path, p.subject_id}] = std::move(p);
  }
  out.points.reserve(points.size());
  for (auto& [_, p] : points) out.points.push_back(std::move(p));
  return out;
}

Status classify_deviation(double d, const ToleranceSpec& tol) {
  if (d <= tol.warn_threshold) return Status::kOk;
  if (d <= tol.violation_threshold) return Status::kWarn;
  return Status::kViolation;
}

ClassifiedSeries tolerance_range_check(const ActualSeries& actual, const Baseline& baseline,
                                       const ToleranceSpec& tol) {
  tol.validate();
  check_units(actual, baseline);
  ClassifiedSeries out;
  out.baseline_id = baseline.baseline_id;
  out.unit = baseline.unit;
  out.tolerance = tol;

  std::map<std::pair<std::string, std::string>, ClassifiedPoint> points;
  for (const auto& a : actual.points) {
    ClassifiedPoint p;
    p.step_path = a.step_path;
    p.subject_id = a.subject_id;
    p.actual = a.value;
    if (const auto* planned = baseline.find(a.step_path)) {
      p.planned = planned->planned;
      const double dev_abs = a.value - planned->planned;
      double d;
      if (tol.mode == ToleranceMode::kAbsolute) {
        p.deviation = dev_abs;
        d = std::abs(dev_abs);
      } else if (planned->planned != 0.0) {
        p.deviation = dev_abs / planned->planned;
        d = std::abs(*p.deviation);
      } else {
        // Any deviation from a zero plan is unbounded in relative terms.
        d = dev_abs == 0.0 ? 0.0 : HUGE_VAL;
      }
      p.status = classify_deviation(d, tol);
    } else {
      p.status = Status::kNoBaseline;
    }
    points[{p.step_path, p.subject_id}] = std::move(p);
  }
  out.points.reserve(points.size());
  for (auto& [_, p] : points) out.points.push_back(std::move(p));
  return out;
}

ForecastSeries predict_course(std::span<const TimedValue> series, int horizon, ForecastModel model) {
  if (horizon < 1) throw PreconditionViolation("forecast horizon must be a positive integer");
  std::vector<TimedValue> pts(series.begin(), series.end());
  std::stable_sort(pts.begin(), pts.end(),
                   [](const TimedValue& a, const TimedValue& b) { return a.t < b.t; });

  std::vector<double> distinct;
  for (const auto& p : pts) {
    if (distinct.empty() || distinct.back() != p.t) distinct.push_back(p.t);
  }

  ForecastSeries out;
  out.model = model;
  if (model == ForecastModel::kLinearLeastSquares && distinct.size() < 2) {
    throw InsufficientData("linear least squares needs at least 2 distinct timestamps");
  }
  if (pts.empty()) throw InsufficientData("last-value-hold needs at least 1 point");

  double spacing = 1.0;
  if (distinct.size() >= 2) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < distinct.size(); ++i) gaps.push_back(distinct[i] - distinct[i - 1]);
    std::sort(gaps.begin(), gaps.end());
    const std::size_t mid = gaps.size() / 2;
    spacing = gaps.size() % 2 ? gaps[mid] : (gaps[mid - 1] + gaps[mid]) / 2.0;
  }
  const double last_t = distinct.back();

  if (model == ForecastModel::kLastValueHold) {
    const double held = pts.back().value;
    out.intercept = held;
    for (const auto& p : pts) out.residual_ss += (p.value - held) * (p.value - held);
    for (int k = 1; k <= horizon; ++k) out.horizon.push_back({last_t + k * spacing, held});
    return out;
  }

  // Means taken relative to the first point so a constant series is an
  // exact fixed point.
  const auto n = static_cast<double>(pts.size());
  const double t0 = pts.front().t;
  const double v0 = pts.front().value;
  double dt_sum = 0.0;
  double dv_sum = 0.0;
  for (const auto& p : pts) {
    dt_sum += p.t - t0;
    dv_sum += p.value - v0;
  }
  const double t_mean = t0 + dt_sum / n;
  const double v_mean = v0 + dv_sum / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& p : pts) {
    sxx += (p.t - t_mean) * (p.t - t_mean);
    sxy += (p.t - t_mean) * (p.value - v_mean);
  }
  out.slope = sxy / sxx;
  out.intercept = v_mean - out.slope * t_mean;
  auto fitted = [&](double t) { return v_mean + out.slope * (t - t_mean); };
  for (const auto& p : pts) {
    const double r = p.value - fitted(p.t);
    out.residual_ss += r * r;
  }
  for (int k = 1; k <= horizon; ++k) {
    const double t = last_t + k * spacing;
    out.horizon.push_back({t, fitted(t)});
  }
  return out;
}

RolledUpSeries aggregate(std::span<const MeasurementPoint> records, const AggregationLevel& level,
                         Reducer reducer, bool by_subject, const StepTree* tree) {
  if (tree != nullptr && !tree->contains(level.under)) {
    throw UnknownStep("step '" + level.under + "' is not in the process step tree");
  }
  RolledUpSeries out;
  out.reducer = reducer;
  struct Group {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::map<std::pair<std::string, std::string>, Group> groups;
  for (const auto& r : records) {
    if (tree != nullptr && !tree->contains(r.step_path)) {
      throw UnknownStep("record step '" + r.step_path + "' is not in the process step tree");
    }
    if (!is_under(r.step_path, level.under)) continue;
    if (out.unit.empty()) out.unit = r.unit;
    auto& g = groups[{step_prefix(r.step_path, level.depth), by_subject ? r.subject_id : ""}];
    g.sum += r.value;
    ++g.count;
  }
  if (reducer == Reducer::kCount) out.unit = "count";
  for (const auto& [key, g] : groups) {
    RolledUpPoint p{key.first, key.second, 0.0, g.count};
    switch (reducer) {
      case Reducer::kSum: p.value = g.sum; break;
      case Reducer::kMean: p.value = g.sum / static_cast<double>(g.count); break;
      case Reducer::kCount: p.value = static_cast<double>(g.count); break;
    }
    out.points.push_back(std::move(p));
  }
  return out;
}

}  // namespace spcc

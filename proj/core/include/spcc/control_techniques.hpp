#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spcc/measurement.hpp"

namespace spcc {

// Kind of value flowing along a catena edge. `kRawSeries` is what a data
// entry produces; the others are technique outputs.
enum class ValueKind {
  kRawSeries,
  kSummary,
  kDeviationSeries,
  kClassifiedSeries,
  kForecastSeries,
  kRolledUpSeries,
};

std::string_view to_string(ValueKind kind);
std::optional<ValueKind> value_kind_from_string(std::string_view text);

struct RawSeries {
  std::string metric_id;
  std::string unit;
  std::vector<MeasurementPoint> points;

  bool operator==(const RawSeries&) const = default;
};

// Arithmetic summary. Every field but `count` is absent for an empty series.
struct Summary {
  std::size_t count = 0;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> mean;
  std::optional<double> last;
  std::optional<double> cumulative;

  bool operator==(const Summary&) const = default;
};

enum class DeviationFlag { kOk, kUndefinedRel, kMissingActual, kNoBaseline };
std::string_view to_string(DeviationFlag flag);

struct DeviationPoint {
  std::string step_path;
  std::string subject_id;
  std::optional<double> actual;
  std::optional<double> planned;
  std::optional<double> deviation_abs;
  std::optional<double> deviation_rel;
  DeviationFlag flag = DeviationFlag::kOk;

  bool operator==(const DeviationPoint&) const = default;
};

struct DeviationSeries {
  std::string baseline_id;
  std::string unit;
  std::vector<DeviationPoint> points;

  bool operator==(const DeviationSeries&) const = default;
};

enum class Status { kOk, kWarn, kViolation, kNoBaseline };
std::string_view to_string(Status status);
std::optional<Status> status_from_string(std::string_view text);

enum class ToleranceMode { kRelative, kAbsolute };

struct ToleranceSpec {
  ToleranceMode mode = ToleranceMode::kRelative;
  double warn_threshold = 0.0;
  double violation_threshold = 0.0;

  // Throws SchemaViolation unless 0 <= warn <= violation and both finite.
  void validate() const;
  bool operator==(const ToleranceSpec&) const = default;
};

struct ClassifiedPoint {
  std::string step_path;
  std::string subject_id;
  double actual = 0.0;
  std::optional<double> planned;
  // Signed deviation in the tolerance mode's units (fraction of plan in
  // relative mode). Absent without a plan, or for a zero plan in relative mode.
  std::optional<double> deviation;
  Status status = Status::kNoBaseline;

  bool operator==(const ClassifiedPoint&) const = default;
};

struct ClassifiedSeries {
  std::string baseline_id;
  std::string unit;
  ToleranceSpec tolerance;
  std::vector<ClassifiedPoint> points;

  bool operator==(const ClassifiedSeries&) const = default;
};

enum class ForecastModel { kLinearLeastSquares, kLastValueHold };
std::string_view to_string(ForecastModel model);
std::optional<ForecastModel> forecast_model_from_string(std::string_view text);

struct TimedValue {
  double t = 0.0;
  double value = 0.0;

  bool operator==(const TimedValue&) const = default;
};

struct ForecastSeries {
  ForecastModel model = ForecastModel::kLinearLeastSquares;
  std::vector<TimedValue> horizon;
  double slope = 0.0;
  double intercept = 0.0;
  double residual_ss = 0.0;

  bool operator==(const ForecastSeries&) const = default;
};

enum class Reducer { kSum, kMean, kCount };
std::string_view to_string(Reducer reducer);
std::optional<Reducer> reducer_from_string(std::string_view text);

struct RolledUpPoint {
  std::string step_path;
  std::string subject_id;  // empty unless grouped by subject
  double value = 0.0;
  std::size_t count = 0;

  bool operator==(const RolledUpPoint&) const = default;
};

struct RolledUpSeries {
  std::string metric_id;
  std::string unit;
  Reducer reducer = Reducer::kSum;
  std::vector<RolledUpPoint> points;

  bool operator==(const RolledUpSeries&) const = default;
};

using Value = std::variant<RawSeries, Summary, DeviationSeries, ClassifiedSeries, ForecastSeries,
                           RolledUpSeries>;

ValueKind kind_of(const Value& value);

// Actual value per (step, subject); the common input of baseline techniques.
struct ActualPoint {
  std::string step_path;
  std::string subject_id;
  double value = 0.0;
};

struct ActualSeries {
  std::string unit;
  std::vector<ActualPoint> points;
};

// Raw points are summed per exact (step, subject); rolled-up points are taken
// as they are. Throws PreconditionViolation for any other kind.
ActualSeries actuals_from(const Value& value);

Summary monitor(std::span<const double> values);

DeviationSeries compare_to_baseline(const ActualSeries& actual, const Baseline& baseline);

// Status for a deviation magnitude `d` (already made non-negative).
Status classify_deviation(double d, const ToleranceSpec& tol);

ClassifiedSeries tolerance_range_check(const ActualSeries& actual, const Baseline& baseline,
                                       const ToleranceSpec& tol);

ForecastSeries predict_course(std::span<const TimedValue> series, int horizon, ForecastModel model);

struct AggregationLevel {
  std::size_t depth = 1;
  std::string under = "/";  // only records at or below this step take part
};

// Groups records by their step prefix at `level.depth` (and by subject when
// `by_subject`), applies `reducer` per group, orders by (step, subject).
// When `tree` is given, every record step and `level.under` must be in it.
RolledUpSeries aggregate(std::span<const MeasurementPoint> records, const AggregationLevel& level,
                         Reducer reducer, bool by_subject, const StepTree* tree = nullptr);

}  // namespace spcc

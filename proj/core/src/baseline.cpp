#include <charconv>

#include "spcc/csv.hpp"
#include "spcc/error.hpp"
#include "spcc/measurement.hpp"

namespace spcc {
namespace {

double parse_number(const std::string& text, std::size_t line) {
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ParseError("baselines line " + std::to_string(line) + ": bad planned value '" + text +
                     "'");
  }
  return value;
}

}  // namespace

BaselineSet parse_baselines_csv(std::string_view text) {
  auto rows = csv::parse(text);
  if (rows.empty()) throw ParseError("baselines: missing header");
  const std::vector<std::string> expected{"metric", "process_step", "planned", "unit"};
  if (rows.front().malformed || rows.front().fields != expected) {
    throw ParseError("baselines: header must be 'metric,process_step,planned,unit'");
  }
  BaselineSet out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.malformed || row.fields.size() != 4) {
      throw ParseError("baselines line " + std::to_string(row.line) + ": malformed row");
    }
    const auto& metric = row.fields[0];
    const auto& step = row.fields[1];
    if (metric.empty()) throw ParseError("baselines line " + std::to_string(row.line) + ": empty metric");
    if (!is_valid_step_path(step)) {
      throw ParseError("baselines line " + std::to_string(row.line) + ": bad step '" + step + "'");
    }
    const double planned = parse_number(row.fields[2], row.line);
    auto& b = out[metric];
    if (b.baseline_id.empty()) {
      b.baseline_id = metric;
      b.metric_id = metric;
      b.unit = row.fields[3];
    } else if (b.unit != row.fields[3]) {
      throw ParseError("baselines line " + std::to_string(row.line) + ": unit differs within metric '" +
                       metric + "'");
    }
    if (b.find(step) != nullptr) {
      throw ParseError("baselines line " + std::to_string(row.line) + ": duplicate step '" + step + "'");
    }
    b.points.push_back({step, planned});
  }
  return out;
}

std::string write_baselines_csv(const BaselineSet& baselines) {
  std::string out = "metric,process_step,planned,unit\n";
  for (const auto& [_, b] : baselines) {
    for (const auto& p : b.points) {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof(buf), p.planned);
      out += csv::join_row({b.metric_id, p.step_path, std::string(buf, res.ptr), b.unit});
      out.push_back('\n');
    }
  }
  return out;
}

}  // namespace spcc

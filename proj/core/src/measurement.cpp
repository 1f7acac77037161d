#include "spcc/measurement.hpp"

#include <algorithm>

namespace spcc {

bool point_less(const MeasurementPoint& a, const MeasurementPoint& b) {
  return std::tie(a.timestamp, a.step_path, a.subject_id, a.source_id, a.value, a.unit) <
         std::tie(b.timestamp, b.step_path, b.subject_id, b.source_id, b.value, b.unit);
}

const BaselinePoint* Baseline::find(std::string_view step_path) const {
  for (const auto& p : points) {
    if (p.step_path == step_path) return &p;
  }
  return nullptr;
}

const DataEntry* DataSnapshot::entry(std::string_view metric_id) const {
  auto it = entries.find(metric_id);
  return it == entries.end() ? nullptr : &it->second;
}

std::size_t DataSnapshot::point_count() const {
  std::size_t n = 0;
  for (const auto& [_, e] : entries) n += e.series.size();
  return n;
}

DataSnapshot DataSnapshot::filtered(
    const std::function<bool(const MeasurementPoint&)>& keep) const {
  DataSnapshot out;
  out.version = version;
  out.as_of = as_of;
  out.steps = steps;
  out.baselines = baselines;
  for (const auto& [metric, e] : entries) {
    DataEntry copy{e.metric_id, e.unit, {}};
    std::copy_if(e.series.begin(), e.series.end(), std::back_inserter(copy.series), keep);
    if (!copy.series.empty()) out.entries.emplace(metric, std::move(copy));
  }
  return out;
}

}  // namespace spcc

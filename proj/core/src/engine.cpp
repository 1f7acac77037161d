#include "spcc/engine.hpp"

#include <algorithm>

namespace spcc {

std::string_view to_string(InstanceState state) {
  switch (state) {
    case InstanceState::kOk: return "ok";
    case InstanceState::kFailed: return "failed";
    case InstanceState::kSkipped: return "skipped";
  }
  return "unknown";
}

const InstanceOutcome* CatenaResult::function(std::string_view id) const {
  auto it = functions.find(id);
  return it == functions.end() ? nullptr : &it->second;
}

const ViewModel* CatenaResult::view(std::string_view id) const {
  auto it = views.find(id);
  return it == views.end() ? nullptr : &it->second;
}

std::vector<TechniqueError> CatenaResult::failures() const {
  std::vector<TechniqueError> out;
  for (const auto& [id, o] : functions) {
    if (o.state == InstanceState::kFailed) out.emplace_back(id, o.error);
  }
  return out;
}

bool CatenaResult::operator==(const CatenaResult& other) const {
  return snapshot_version == other.snapshot_version && catena_version == other.catena_version &&
         evaluated_at == other.evaluated_at && functions == other.functions && views == other.views;
}

namespace {

InstanceOutcome evaluate_instance(const FunctionInstance& f, const TechniqueRegistry& registry,
                                  const DataSnapshot& snapshot,
                                  const std::map<std::string, Value, std::less<>>& entry_values,
                                  const std::map<std::string, InstanceOutcome, std::less<>>& outcomes) {
  InstanceOutcome out;
  std::vector<const Value*> inputs;
  for (const auto& ref : f.inputs) {
    if (auto it = entry_values.find(ref); it != entry_values.end()) {
      inputs.push_back(&it->second);
      continue;
    }
    auto it = outcomes.find(ref);
    if (it == outcomes.end()) {
      out.state = InstanceState::kFailed;
      out.error = "input '" + ref + "' does not resolve";
      return out;
    }
    if (it->second.state != InstanceState::kOk) {
      out.state = InstanceState::kSkipped;
      out.error = "input '" + ref + "' was " + std::string(to_string(it->second.state));
      return out;
    }
    inputs.push_back(&*it->second.value);
  }

  const auto* entry = registry.find(f.technique_id);
  if (!entry) {
    out.state = InstanceState::kFailed;
    out.error = "technique '" + f.technique_id + "' is not registered";
    return out;
  }
  const auto& desc = entry->descriptor;
  if (inputs.size() != desc.inputs.size()) {
    out.state = InstanceState::kFailed;
    out.error = "expected " + std::to_string(desc.inputs.size()) + " input(s), got " + std::to_string(inputs.size());
    return out;
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto kind = kind_of(*inputs[i]);
    if (std::find(desc.inputs[i].begin(), desc.inputs[i].end(), kind) == desc.inputs[i].end()) {
      out.state = InstanceState::kFailed;
      out.error = "input '" + f.inputs[i] + "' has unaccepted kind " + std::string(to_string(kind));
      return out;
    }
  }
  if (auto issues = check_params(desc, f.params); !issues.empty()) {
    out.state = InstanceState::kFailed;
    out.error = "parameter '" + issues.front().param + "': " + issues.front().reason;
    return out;
  }

  const ParamMap params = with_defaults(desc, f.params);
  try {
    Value v = entry->evaluator(TechniqueContext{f.id, params, inputs, snapshot});
    if (kind_of(v) != desc.output) {
      out.state = InstanceState::kFailed;
      out.error = "technique produced " + std::string(to_string(kind_of(v))) + ", declared " +
                  std::string(to_string(desc.output));
      return out;
    }
    out.value = std::move(v);
  } catch (const TechniqueError& e) {
    out.state = InstanceState::kFailed;
    out.error = e.cause();
  } catch (const std::exception& e) {
    out.state = InstanceState::kFailed;
    out.error = e.what();
  }
  return out;
}

}  // namespace

CatenaResult execute_catena(const VisualizationCatena& vc, std::shared_ptr<const DataSnapshot> snapshot,
                            std::shared_ptr<const TechniqueRegistry> registry, const ExecutionOptions& options) {
  if (!snapshot || !registry) throw PreconditionViolation("execute_catena needs a snapshot and a registry");
  auto natural = topological_order(vc);
  if (!natural) throw CycleError("catena '" + vc.id + "' has a reference cycle");
  std::vector<std::string> order = std::move(*natural);
  if (options.order) {
    if (!is_topological_order(vc, *options.order)) {
      throw PreconditionViolation("requested evaluation order is not a topological order");
    }
    order = *options.order;
  }

  CatenaResult result;
  result.snapshot_version = snapshot->version;
  result.catena_version = vc.version;
  result.evaluated_at = snapshot->as_of;
  result.context = std::make_shared<const EvaluationContext>(EvaluationContext{vc, snapshot, registry});

  std::map<std::string, Value, std::less<>> entry_values;
  for (const auto& d : vc.data_entries) {
    RawSeries raw{d.metric_id, {}, {}};
    if (const auto* e = snapshot->entry(d.metric_id)) {
      raw.unit = e->unit;
      raw.points = e->series;
    }
    entry_values.emplace(d.id, std::move(raw));
  }

  for (const auto& id : order) {
    const auto* f = vc.function(id);
    result.functions.emplace(id, evaluate_instance(*f, *registry, *snapshot, entry_values, result.functions));
  }
  for (const auto& v : vc.view_instances) {
    result.views.emplace(v.id, render_view(v, result.functions, result.snapshot_version, result.catena_version));
  }
  return result;
}

VisualizationCatena reparameterize(const VisualizationCatena& vc, std::string_view instance_id, ParamMap new_params,
                                   const TechniqueRegistry& registry) {
  const auto* f = vc.function(instance_id);
  if (!f) throw UnknownInstance("function instance '" + std::string(instance_id) + "' does not exist");
  const auto* entry = registry.find(f->technique_id);
  if (!entry) throw SchemaViolation("technique", "'" + f->technique_id + "' is not registered");
  if (auto issues = check_params(entry->descriptor, new_params); !issues.empty()) {
    throw SchemaViolation(issues.front().param, issues.front().reason);
  }
  VisualizationCatena next = vc;
  for (auto& fi : next.function_instances) {
    if (fi.id == instance_id) fi.params = std::move(new_params);
  }
  ++next.version;
  return next;
}

ViewModel drill_down(const CatenaResult& result, std::string_view view_id, std::string_view step_path) {
  const auto* rendered = result.view(view_id);
  if (!rendered) throw UnknownView("view '" + std::string(view_id) + "' is not in the result");
  if (step_path == "/") return *rendered;
  if (!result.context) throw PreconditionViolation("result carries no evaluation context");
  const auto& ctx = *result.context;
  if (!ctx.snapshot->steps.contains(step_path)) {
    throw UnknownStep("step '" + std::string(step_path) + "' is not in the process step tree");
  }

  VisualizationCatena drilled = ctx.catena;
  const auto upstream = upstream_of_view(drilled, view_id);
  const auto finer = static_cast<std::int64_t>(step_depth(step_path) + 1);
  for (auto& f : drilled.function_instances) {
    if (f.technique_id != "aggregate") continue;
    if (std::find(upstream.begin(), upstream.end(), f.id) == upstream.end()) continue;
    f.params["depth"] = finer;
    f.params["under"] = std::string(step_path);
  }
  const std::string step(step_path);
  auto restricted = std::make_shared<const DataSnapshot>(
      ctx.snapshot->filtered([&](const MeasurementPoint& p) { return is_under(p.step_path, step); }));
  auto sub = execute_catena(drilled, restricted, ctx.registry);
  ViewModel out = *sub.view(view_id);
  out.snapshot_version = result.snapshot_version;
  out.catena_version = result.catena_version;
  out.drill_path = step;
  return out;
}

}  // namespace spcc

#include "spcc/experience_base.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spcc/engine.hpp"
#include "spcc/error.hpp"
#include "spcc/hashing.hpp"

namespace spcc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kPackageFiles[] = {"plan.json", "context.json", "catena.json", "baselines.csv", "outcome.json"};

json facet_to_json(const FacetValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  const double d = std::get<double>(v);
  if (std::nearbyint(d) == d && std::fabs(d) < 9.0e15) return static_cast<std::int64_t>(d);
  return d;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CorruptPackage("missing package file '" + p.filename().string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
  out.flush();
  if (!out) throw StorageError("cannot write '" + p.string() + "'");
}

std::string content_hash(const std::map<std::string, std::string>& files) {
  std::string all;
  for (const char* name : kPackageFiles) {
    auto it = files.find(name);
    all += name;
    all += '\0';
    if (it != files.end()) all += it->second;
    all += '\0';
  }
  return sha256_hex(all);
}

std::optional<std::uint64_t> sequence_of(std::string_view package_id) {
  if (package_id.size() != 19 || package_id[6] != '-') return std::nullopt;
  std::uint64_t seq = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    if (package_id[i] < '0' || package_id[i] > '9') return std::nullopt;
    seq = seq * 10 + static_cast<std::uint64_t>(package_id[i] - '0');
  }
  for (std::size_t i = 7; i < 19; ++i) {
    const char c = package_id[i];
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return std::nullopt;
  }
  return seq;
}

json outcome_to_json(const OutcomeSummary& outcome) {
  json out = json::object();
  for (const auto& [metric, counts] : outcome) out[metric] = counts;
  return out;
}

void check_catena(const VisualizationCatena& vc, const GqmPlan& plan, const TechniqueRegistry& registry) {
  const auto report = validate_catena(vc, registry, plan);
  if (!report.is_valid()) {
    const auto lines = report.lines();
    throw CorruptPackage("archived catena does not validate: " + (lines.empty() ? std::string() : lines.front()));
  }
}

}  // namespace

ContextProfile context_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("context: expected an object");
  ContextProfile c;
  if (doc.contains("project_id")) {
    if (!doc.at("project_id").is_string()) throw ParseError("context.project_id: expected a string");
    c.project_id = doc.at("project_id").get<std::string>();
  }
  if (doc.contains("notes")) {
    if (!doc.at("notes").is_string()) throw ParseError("context.notes: expected a string");
    c.notes = doc.at("notes").get<std::string>();
  }
  if (doc.contains("characterization")) {
    const auto& facets = doc.at("characterization");
    if (!facets.is_object()) throw ParseError("context.characterization: expected an object");
    for (const auto& [name, value] : facets.items()) {
      if (name.empty()) throw ParseError("context.characterization: facet names must be non-empty");
      if (value.is_string()) {
        c.facets.emplace(name, value.get<std::string>());
      } else if (value.is_number()) {
        c.facets.emplace(name, value.get<double>());
      } else {
        throw ParseError("context.characterization." + name + ": expected a string or a number");
      }
    }
  }
  return c;
}

json to_json(const ContextProfile& context) {
  json facets = json::object();
  for (const auto& [name, value] : context.facets) facets[name] = facet_to_json(value);
  return {{"project_id", context.project_id}, {"characterization", facets}, {"notes", context.notes}};
}

OutcomeSummary summarize_outcome(const CatenaResult& result) {
  OutcomeSummary out;
  if (!result.context) return out;
  for (const auto& [id, o] : result.functions) {
    if (!o.value) continue;
    const auto* classified = std::get_if<ClassifiedSeries>(&*o.value);
    if (!classified) continue;
    for (const auto& metric : metrics_feeding(result.context->catena, id)) {
      auto& counts = out[metric];
      for (const char* s : {"OK", "WARN", "VIOLATION"}) counts.try_emplace(s, 0);
      for (const auto& p : classified->points) ++counts[std::string(to_string(p.status))];
    }
  }
  return out;
}

double context_similarity(const ContextProfile& query, const ContextProfile& stored,
                          std::vector<std::string>* matched) {
  if (query.facets.empty()) throw PreconditionViolation("similarity query needs at least one facet");
  std::size_t hits = 0;
  for (const auto& [name, value] : query.facets) {
    auto it = stored.facets.find(name);
    if (it != stored.facets.end() && it->second == value) {
      ++hits;
      if (matched) matched->push_back(name);
    }
  }
  return static_cast<double>(hits) / static_cast<double>(query.facets.size());
}

CatenaTemplate reuse_catena(const ExperiencePackage& package, std::string_view new_project_id,
                            const TechniqueRegistry& registry) {
  CatenaTemplate out;
  out.catena = package.catena;
  out.catena.project_id = std::string(new_project_id);
  for (auto& f : out.catena.function_instances) {
    const auto* entry = registry.find(f.technique_id);
    if (!entry) throw CorruptPackage("technique '" + f.technique_id + "' of '" + f.id + "' is not registered");
    for (const auto& spec : entry->descriptor.params) {
      if (!spec.project_bound) continue;
      OpenParameter open{f.id, spec.name, spec.type, spec.required, std::nullopt};
      if (auto it = f.params.find(spec.name); it != f.params.end()) {
        open.archived_value = it->second;
        f.params.erase(it);
      }
      out.open_parameters.push_back(std::move(open));
    }
  }
  return out;
}

ParameterBindings archived_bindings(const CatenaTemplate& tmpl) {
  ParameterBindings out;
  for (const auto& p : tmpl.open_parameters) {
    if (p.archived_value) out.emplace(std::make_pair(p.instance_id, p.param), *p.archived_value);
  }
  return out;
}

VisualizationCatena bind_parameters(const CatenaTemplate& tmpl, const ParameterBindings& values,
                                    const TechniqueRegistry& registry) {
  VisualizationCatena vc = tmpl.catena;
  for (const auto& [key, value] : values) {
    const auto& [instance, param] = key;
    const bool open = std::any_of(tmpl.open_parameters.begin(), tmpl.open_parameters.end(),
                                  [&](const OpenParameter& p) { return p.instance_id == instance && p.param == param; });
    if (!open) throw SchemaViolation(instance + "." + param, "not an open parameter of the template");
  }
  for (const auto& p : tmpl.open_parameters) {
    auto it = values.find({p.instance_id, p.param});
    if (it == values.end()) {
      if (p.required) throw SchemaViolation(p.instance_id + "." + p.param, "open parameter requires a value");
      continue;
    }
    for (auto& f : vc.function_instances) {
      if (f.id == p.instance_id) f.params[p.param] = it->second;
    }
  }
  for (const auto& f : vc.function_instances) {
    const auto* entry = registry.find(f.technique_id);
    if (!entry) throw SchemaViolation(f.id, "technique '" + f.technique_id + "' is not registered");
    if (auto issues = check_params(entry->descriptor, f.params); !issues.empty()) {
      throw SchemaViolation(f.id + "." + issues.front().param, issues.front().reason);
    }
  }
  return vc;
}

ExperienceBase::ExperienceBase(std::string root) : root_(std::move(root)) {}

std::vector<std::string> ExperienceBase::list() const {
  std::vector<std::string> ids;
  std::error_code ec;
  const fs::path dir = fs::path(root_) / "packages";
  if (!fs::exists(dir, ec)) return ids;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    const auto name = e.path().filename().string();
    if (e.is_directory() && sequence_of(name)) ids.push_back(name);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

ExperiencePackage ExperienceBase::package_results(const VisualizationCatena& vc, const CatenaResult* result,
                                                  const ContextProfile& context, const GqmPlan& plan,
                                                  const BaselineSet& baselines, const TechniqueRegistry& registry,
                                                  Timestamp created_at) {
  if (!result) throw NoResults("project '" + vc.project_id + "' has no executed catena result");
  check_catena(vc, plan, registry);

  ExperiencePackage pkg;
  pkg.context = context;
  pkg.catena = vc;
  pkg.plan = plan;
  pkg.baselines = baselines;
  pkg.outcome = summarize_outcome(*result);
  pkg.created_at = created_at;

  std::map<std::string, std::string> files;
  files["plan.json"] = to_json(plan).dump(2) + "\n";
  files["context.json"] = to_json(context).dump(2) + "\n";
  files["catena.json"] = to_json(vc).dump(2) + "\n";
  files["baselines.csv"] = write_baselines_csv(baselines);
  files["outcome.json"] =
      json{{"created_at", created_at}, {"project_id", vc.project_id}, {"summary", outcome_to_json(pkg.outcome)}}.dump(2) +
      "\n";
  const std::string hash = content_hash(files);

  std::lock_guard lock(write_mutex_);
  std::uint64_t seq = 1;
  if (auto ids = list(); !ids.empty()) seq = *sequence_of(ids.back()) + 1;
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%06llu", static_cast<unsigned long long>(seq));
  pkg.sequence = seq;
  pkg.package_id = std::string(prefix) + "-" + hash.substr(0, 12);

  const fs::path dir = fs::path(root_) / "packages";
  const fs::path tmp = dir / (".tmp-" + pkg.package_id);
  std::error_code ec;
  fs::create_directories(tmp, ec);
  if (ec) throw StorageError("cannot create '" + tmp.string() + "': " + ec.message());
  try {
    for (const auto& [name, content] : files) write_file(tmp / name, content);
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
  fs::rename(tmp, dir / pkg.package_id, ec);
  if (ec) {
    fs::remove_all(tmp, ec);
    throw StorageError("cannot commit package '" + pkg.package_id + "'");
  }
  return pkg;
}

ExperiencePackage ExperienceBase::load(std::string_view package_id, const TechniqueRegistry& registry) const {
  const auto seq = sequence_of(package_id);
  const fs::path dir = fs::path(root_) / "packages" / std::string(package_id);
  std::error_code ec;
  if (!seq || !fs::is_directory(dir, ec)) throw UnknownPackage("package '" + std::string(package_id) + "' does not exist");

  std::map<std::string, std::string> files;
  for (const char* name : kPackageFiles) files[name] = read_file(dir / name);
  if (content_hash(files).substr(0, 12) != package_id.substr(7)) {
    throw CorruptPackage("package '" + std::string(package_id) + "' content does not match its hash");
  }

  ExperiencePackage pkg;
  pkg.package_id = std::string(package_id);
  pkg.sequence = *seq;
  try {
    pkg.plan = load_plan(files["plan.json"]);
    pkg.context = context_from_json(json::parse(files["context.json"]));
    pkg.catena = load_catena(files["catena.json"]);
    pkg.baselines = parse_baselines_csv(files["baselines.csv"]);
    const json outcome = json::parse(files["outcome.json"]);
    pkg.created_at = outcome.at("created_at").get<Timestamp>();
    for (const auto& [metric, counts] : outcome.at("summary").items()) {
      for (const auto& [status, n] : counts.items()) pkg.outcome[metric][status] = n.get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw CorruptPackage("package '" + std::string(package_id) + "': " + e.what());
  } catch (const ParseError& e) {
    throw CorruptPackage("package '" + std::string(package_id) + "': " + e.what());
  } catch (const EmptyField& e) {
    throw CorruptPackage("package '" + std::string(package_id) + "': " + e.what());
  }
  check_catena(pkg.catena, pkg.plan, registry);
  return pkg;
}

std::vector<ReuseCandidate> ExperienceBase::retrieve_candidates(const ContextProfile& query,
                                                                const TechniqueRegistry& registry) const {
  if (query.facets.empty()) throw PreconditionViolation("similarity query needs at least one facet");
  std::vector<std::pair<ReuseCandidate, std::uint64_t>> ranked;
  for (const auto& id : list()) {
    ExperiencePackage pkg;
    try {
      pkg = load(id, registry);
    } catch (const Error&) {
      continue;
    }
    ReuseCandidate c;
    c.package_id = id;
    c.similarity = context_similarity(query, pkg.context, &c.matched_facets);
    c.open_parameters = reuse_catena(pkg, query.project_id, registry).open_parameters;
    c.created_at = pkg.created_at;
    ranked.emplace_back(std::move(c), pkg.sequence);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first.similarity != b.first.similarity) return a.first.similarity > b.first.similarity;
    if (a.first.created_at != b.first.created_at) return a.first.created_at > b.first.created_at;
    return a.second > b.second;
  });
  std::vector<ReuseCandidate> out;
  for (auto& [c, seq] : ranked) out.push_back(std::move(c));
  return out;
}

}  // namespace spcc

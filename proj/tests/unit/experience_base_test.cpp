#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "spcc/engine.hpp"
#include "spcc/error.hpp"
#include "spcc/experience_base.hpp"
#include "spcc/ingestion.hpp"

namespace spcc {
namespace {

using fixtures::point;
using nlohmann::json;

ContextProfile profile(std::string project, std::map<std::string, FacetValue, std::less<>> facets) {
  return ContextProfile{std::move(project), std::move(facets), ""};
}

VisualizationCatena check_catena() {
  auto vc = catena_from_json(json::parse(R"({"id": "vc", "project_id": "p",
    "data_entries": [{"id": "e", "metric": "effort"}],
    "function_instances": [
      {"id": "check", "technique": "tolerance_range_check",
       "params": {"baseline": "effort", "warn": 0.1, "violation": 0.2}, "inputs": ["e"]},
      {"id": "dev", "technique": "compare_to_baseline", "params": {"baseline": "effort"}, "inputs": ["e"]},
      {"id": "summary", "technique": "monitor", "inputs": ["e"]}],
    "view_instances": [{"id": "pm", "mechanism": "status-board", "role": "project manager",
                        "inputs": ["check", "dev", "summary"]}]})"));
  return vc;
}

BaselineSet baselines() { return {{"effort", fixtures::baseline("effort", "h", {{"/design/ui", 10.0}})}}; }

// 10 OK, 2 WARN, 1 VIOLATION, one subject each.
std::shared_ptr<const DataSnapshot> snapshot() {
  std::vector<MeasurementPoint> points;
  const double actuals[] = {10, 10.5, 9.5, 10, 11, 9, 10, 10.2, 9.8, 10, 11.5, 8.5, 13};
  for (int i = 0; i < 13; ++i) points.push_back(point(i, "/design/ui", "s" + std::to_string(i), actuals[i]));
  return fixtures::snapshot_of({{"effort", points}}, fixtures::small_plan().steps, baselines(), 3);
}

TEST(ContextSimilarity, ThreeOfFourFacets) {
  auto query = profile("q", {{"domain", "web"}, {"team_size", 11.0}, {"process", "phased"}, {"weeks", 10.0}});
  auto stored = profile("s", {{"domain", "web"}, {"team_size", 11.0}, {"process", "phased"}, {"weeks", 12.0}});
  std::vector<std::string> matched;
  EXPECT_EQ(context_similarity(query, stored, &matched), 3.0 / 4.0);
  EXPECT_EQ(matched, (std::vector<std::string>{"domain", "process", "team_size"}));
  EXPECT_EQ(context_similarity(query, query), 1.0);
  EXPECT_THROW(context_similarity(profile("q", {}), stored), PreconditionViolation);
}

TEST(OutcomeSummary, TalliesTheClassifiedSeries) {
  auto result = execute_catena(check_catena(), snapshot(), fixtures::builtins());
  auto outcome = summarize_outcome(result);
  // Oracle: count statuses in the classified output directly.
  std::map<std::string, std::size_t> direct{{"OK", 0}, {"WARN", 0}, {"VIOLATION", 0}};
  for (const auto& p : std::get<ClassifiedSeries>(*result.function("check")->value).points) {
    ++direct[std::string(to_string(p.status))];
  }
  EXPECT_EQ(outcome.at("effort"), direct);
  EXPECT_EQ(direct, (std::map<std::string, std::size_t>{{"OK", 10}, {"WARN", 2}, {"VIOLATION", 1}}));
}

TEST(ExperienceBase, EmptyStoreHasNoCandidates) {
  fixtures::TempDir dir;
  ExperienceBase base(dir.path());
  EXPECT_TRUE(base.list().empty());
  EXPECT_TRUE(base.retrieve_candidates(profile("q", {{"domain", "web"}}), *fixtures::builtins()).empty());
}

TEST(ExperienceBase, PackageLoadRoundTrip) {
  fixtures::TempDir dir;
  ExperienceBase base(dir.path());
  auto result = execute_catena(check_catena(), snapshot(), fixtures::builtins());
  auto ctx = profile("p", {{"domain", "web"}});
  auto pkg = base.package_results(check_catena(), &result, ctx, fixtures::small_plan(), baselines(),
                                  *fixtures::builtins(), 1000);
  EXPECT_EQ(pkg.sequence, 1u);
  EXPECT_EQ(pkg.package_id.substr(0, 7), "000001-");
  EXPECT_EQ(base.load(pkg.package_id, *fixtures::builtins()), pkg);
  EXPECT_EQ(base.list(), std::vector<std::string>{pkg.package_id});
  EXPECT_THROW(base.load("000009-abcdefabcdef", *fixtures::builtins()), UnknownPackage);
}

TEST(ExperienceBase, NoResultsWithoutAnEvaluation) {
  fixtures::TempDir dir;
  ExperienceBase base(dir.path());
  EXPECT_THROW(base.package_results(check_catena(), nullptr, profile("p", {{"a", "b"}}), fixtures::small_plan(),
                                    baselines(), *fixtures::builtins(), 0),
               NoResults);
}

TEST(ExperienceBase, TruncatedCatenaIsCorrupt) {
  fixtures::TempDir dir;
  ExperienceBase base(dir.path());
  auto result = execute_catena(check_catena(), snapshot(), fixtures::builtins());
  auto pkg = base.package_results(check_catena(), &result, profile("p", {{"domain", "web"}}),
                                  fixtures::small_plan(), baselines(), *fixtures::builtins(), 1);
  const auto path = dir.path() + "/packages/" + pkg.package_id + "/catena.json";
  auto text = fixtures::read_file(path);
  fixtures::write_file(path, text.substr(0, text.size() / 2));
  EXPECT_THROW(base.load(pkg.package_id, *fixtures::builtins()), CorruptPackage);
  EXPECT_TRUE(base.retrieve_candidates(profile("q", {{"domain", "web"}}), *fixtures::builtins()).empty());
}

TEST(ExperienceBase, RankingTieBreaksOnRecency) {
  fixtures::TempDir dir;
  ExperienceBase base(dir.path());
  auto result = execute_catena(check_catena(), snapshot(), fixtures::builtins());
  auto store = [&](std::map<std::string, FacetValue, std::less<>> facets, Timestamp at) {
    return base
        .package_results(check_catena(), &result, profile("p", std::move(facets)), fixtures::small_plan(),
                         baselines(), *fixtures::builtins(), at)
        .package_id;
  };
  auto older = store({{"domain", "web"}, {"size", 11.0}}, 100);
  auto partial = store({{"domain", "web"}, {"size", 14.0}}, 300);
  auto newer = store({{"domain", "web"}, {"size", 11.0}}, 200);

  auto ranked = base.retrieve_candidates(profile("q", {{"domain", "web"}, {"size", 11.0}}), *fixtures::builtins());
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].package_id, newer);
  EXPECT_EQ(ranked[0].similarity, 1.0);
  EXPECT_EQ(ranked[1].package_id, older);
  EXPECT_EQ(ranked[2].package_id, partial);
  EXPECT_EQ(ranked[2].similarity, 0.5);
}

TEST(Reuse, OpenParametersAreBaselinesAndThresholds) {
  ExperiencePackage pkg;
  pkg.catena = check_catena();
  auto tmpl = reuse_catena(pkg, "next", *fixtures::builtins());
  EXPECT_EQ(tmpl.catena.project_id, "next");

  // Oracle: parameters typed as baseline references or tolerance thresholds.
  std::set<std::pair<std::string, std::string>> expected;
  for (const auto& f : pkg.catena.function_instances) {
    for (const auto& [name, value] : f.params) {
      if (name == "baseline" || name == "warn" || name == "violation") expected.insert({f.id, name});
    }
  }
  std::set<std::pair<std::string, std::string>> open;
  for (const auto& p : tmpl.open_parameters) open.insert({p.instance_id, p.param});
  EXPECT_EQ(open, expected);
  EXPECT_FALSE(tmpl.catena.function("check")->params.count("warn"));
  EXPECT_TRUE(tmpl.catena.function("check")->params.count("mode") == pkg.catena.function("check")->params.count("mode"));
}

TEST(Reuse, RebindingArchivedValuesRestoresTheCatena) {
  ExperiencePackage pkg;
  pkg.catena = check_catena();
  auto tmpl = reuse_catena(pkg, "p", *fixtures::builtins());
  auto rebound = bind_parameters(tmpl, archived_bindings(tmpl), *fixtures::builtins());
  EXPECT_TRUE(same_structure(rebound, pkg.catena));

  auto partial = archived_bindings(tmpl);
  partial.erase({"check", "warn"});
  EXPECT_THROW(bind_parameters(tmpl, partial, *fixtures::builtins()), SchemaViolation);
  auto bogus = archived_bindings(tmpl);
  bogus[{"check", "colour"}] = std::string("red");
  EXPECT_THROW(bind_parameters(tmpl, bogus, *fixtures::builtins()), SchemaViolation);
}

TEST(Reuse, UnknownTechniqueIsCorrupt) {
  ExperiencePackage pkg;
  pkg.catena = check_catena();
  pkg.catena.function_instances[0].technique_id = "retired";
  EXPECT_THROW(reuse_catena(pkg, "p", *fixtures::builtins()), CorruptPackage);
}

TEST(ContextProfile, JsonRoundTrip) {
  auto ctx = profile("p", {{"domain", "web"}, {"team_size", 14.0}});
  ctx.notes = "second run";
  EXPECT_EQ(context_from_json(to_json(ctx)), ctx);
  EXPECT_THROW(context_from_json(json::parse(R"({"project_id": "p", "characterization": {"x": [1]}})")), ParseError);
}

}  // namespace
}  // namespace spcc

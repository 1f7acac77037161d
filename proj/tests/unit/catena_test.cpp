#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "spcc/access_control.hpp"
#include "spcc/catena.hpp"
#include "spcc/error.hpp"

namespace spcc {
namespace {

using nlohmann::json;

json course_style_doc() {
  return json::parse(R"({
    "id": "vc", "project_id": "p", "version": 1,
    "data_entries": [
      {"id": "effort_data", "metric": "effort"},
      {"id": "defect_data", "metric": "defects"}
    ],
    "function_instances": [
      {"id": "effort_by_phase", "technique": "aggregate", "params": {"depth": 1}, "inputs": ["effort_data"]},
      {"id": "effort_check", "technique": "tolerance_range_check",
       "params": {"baseline": "effort", "warn": 0.1, "violation": 0.2}, "inputs": ["effort_by_phase"]},
      {"id": "effort_summary", "technique": "monitor", "inputs": ["effort_data"]}
    ],
    "view_instances": [
      {"id": "pm", "mechanism": "status-board", "role": "project manager", "inputs": ["effort_check"]},
      {"id": "qa", "mechanism": "table", "role": "QA manager", "inputs": ["effort_summary"]}
    ]
  })");
}

// Oracle: data entries reached by no edge of the reference graph.
std::set<std::string> unreachable_entries(const VisualizationCatena& vc) {
  std::set<std::string> referenced;
  for (const auto& f : vc.function_instances) referenced.insert(f.inputs.begin(), f.inputs.end());
  std::set<std::string> out;
  for (const auto& d : vc.data_entries) {
    if (!referenced.count(d.id)) out.insert(d.id);
  }
  return out;
}

std::set<std::string> subjects(const ValidationReport& r, FindingCategory c) {
  std::set<std::string> out;
  for (const auto& f : r.findings) {
    if (f.category == c) out.insert(f.subject);
  }
  return out;
}

TEST(ValidateCatena, EmptyCatenaHasNoFindings) {
  auto report = validate_catena(VisualizationCatena{}, *fixtures::builtins(), GqmPlan{});
  EXPECT_TRUE(report.is_valid());
  EXPECT_TRUE(report.findings.empty());
}

TEST(ValidateCatena, SelfLoopIsACycle) {
  auto doc = course_style_doc();
  doc["function_instances"][2]["inputs"] = json::array({"effort_summary"});
  auto report = validate_catena(catena_from_json(doc), *fixtures::builtins(), fixtures::small_plan());
  EXPECT_FALSE(report.is_valid());
  EXPECT_EQ(report.count(FindingCategory::kCycle), 1u);
}

TEST(ValidateCatena, UnwiredDefectEntryIsTheOnlyFinding) {
  auto vc = catena_from_json(course_style_doc());
  auto report = validate_catena(vc, *fixtures::builtins(), fixtures::small_plan());
  EXPECT_TRUE(report.is_valid());
  EXPECT_EQ(report.findings.size(), 1u);
  EXPECT_EQ(subjects(report, FindingCategory::kUnusedDataEntry), unreachable_entries(vc));
  EXPECT_EQ(unreachable_entries(vc), std::set<std::string>{"defect_data"});
}

TEST(ValidateCatena, DanglingReferencesAndSchemaViolations) {
  auto doc = course_style_doc();
  doc["function_instances"][0]["inputs"] = json::array({"nothing"});
  doc["function_instances"][1]["params"]["warn"] = 0.5;
  doc["view_instances"][1]["inputs"] = json::array({"effort_data"});
  auto report = validate_catena(catena_from_json(doc), *fixtures::builtins(), fixtures::small_plan());
  EXPECT_FALSE(report.is_valid());
  EXPECT_TRUE(subjects(report, FindingCategory::kDanglingReference).count("effort_by_phase"));
  EXPECT_TRUE(subjects(report, FindingCategory::kSchemaViolation).count("effort_check"));
  EXPECT_TRUE(subjects(report, FindingCategory::kSchemaViolation).count("qa"));
}

TEST(ValidateCatena, ArityAndInputKinds) {
  auto doc = course_style_doc();
  doc["function_instances"][2]["inputs"] = json::array({"effort_data", "effort_data"});
  doc["function_instances"][1]["inputs"] = json::array({"effort_summary"});
  auto report = validate_catena(catena_from_json(doc), *fixtures::builtins(), fixtures::small_plan());
  auto bad = subjects(report, FindingCategory::kSchemaViolation);
  EXPECT_TRUE(bad.count("effort_summary"));
  EXPECT_TRUE(bad.count("effort_check"));
}

TEST(ValidateCatena, RolesResolvedWhenATableIsGiven) {
  RoleTable roles;
  roles.add({"project manager", "project manager", Scope::kAllGroups});
  auto report = validate_catena(catena_from_json(course_style_doc()), *fixtures::builtins(),
                                fixtures::small_plan(), &roles);
  EXPECT_EQ(subjects(report, FindingCategory::kUnresolvedRole), std::set<std::string>{"qa"});
  EXPECT_TRUE(report.is_valid());
}

TEST(CatenaDocument, RoundTripAndShapeErrors) {
  auto vc = catena_from_json(course_style_doc());
  EXPECT_EQ(catena_from_json(to_json(vc)), vc);
  EXPECT_EQ(load_catena(to_json(vc).dump()), vc);

  auto doc = course_style_doc();
  doc["view_instances"][0]["mechanism"] = "hologram";
  EXPECT_THROW(catena_from_json(doc), ParseError);
  EXPECT_THROW(load_catena("{\"id\": \"vc\", \"data_entries\": ["), ParseError);
}

TEST(CatenaGraph, OrdersAndDependents) {
  auto vc = catena_from_json(course_style_doc());
  auto order = topological_order(vc);
  ASSERT_TRUE(order);
  EXPECT_TRUE(is_topological_order(vc, *order));
  EXPECT_FALSE(is_topological_order(vc, {"effort_check", "effort_by_phase", "effort_summary"}));
  EXPECT_FALSE(is_topological_order(vc, {"effort_by_phase", "effort_check"}));
  EXPECT_EQ(dependents_of(vc, "effort_by_phase"), std::vector<std::string>{"effort_check"});
  EXPECT_EQ(upstream_of_view(vc, "pm").size(), 2u);
  EXPECT_EQ(metrics_feeding(vc, "effort_check"), std::vector<std::string>{"effort"});
}

TEST(CatenaGraph, SameStructureIgnoresVersion) {
  auto a = catena_from_json(course_style_doc());
  auto b = a;
  b.version = 9;
  EXPECT_TRUE(same_structure(a, b));
  EXPECT_FALSE(a == b);
}

}  // namespace
}  // namespace spcc

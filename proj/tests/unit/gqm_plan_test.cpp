#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "spcc/access_control.hpp"
#include "spcc/catena.hpp"
#include "spcc/error.hpp"
#include "spcc/gqm_plan.hpp"

namespace spcc {
namespace {

using nlohmann::json;

TEST(FormulateGoal, RendersTheCourseGoals) {
  auto effort = formulate_goal("the project effort", "baseline checking", "project manager",
                               "a practical course at UKL");
  EXPECT_EQ(effort.render(),
            "Analyze the project effort for the purpose of baseline checking from the viewpoint of the "
            "project manager in the context of a practical course at UKL");
  auto defects = formulate_goal("the found defects", "defect tracking", "QA manager", "a practical course at UKL");
  EXPECT_EQ(defects.render(),
            "Analyze the found defects for the purpose of defect tracking from the viewpoint of the "
            "QA manager in the context of a practical course at UKL");
}

TEST(FormulateGoal, EmptyFieldRejected) {
  EXPECT_THROW(formulate_goal("", "x", "y", "z"), EmptyField);
  EXPECT_THROW(formulate_goal("x", "", "y", "z"), EmptyField);
  EXPECT_THROW(formulate_goal("x", "y", "", "z"), EmptyField);
  EXPECT_THROW(formulate_goal("x", "y", "z", ""), EmptyField);
}

TEST(FormulateGoal, RenderParsesBack) {
  auto goal = formulate_goal("the code", "characterization", "developer", "team A", "reliability");
  auto parsed = parse_goal_sentence(goal.render());
  ASSERT_TRUE(parsed);
  EXPECT_EQ(*parsed, goal);
  EXPECT_FALSE(parse_goal_sentence("not a goal"));
}

TEST(GqmPlan, JsonRoundTrip) {
  auto plan = fixtures::small_plan();
  EXPECT_EQ(plan_from_json(to_json(plan)), plan);
}

TEST(GqmPlan, RejectsBrokenCrossReferences) {
  auto doc = fixtures::small_plan_json();
  doc["metrics"][0]["goals"] = json::array({"G9"});
  EXPECT_THROW(plan_from_json(doc), ParseError);

  doc = fixtures::small_plan_json();
  doc["metrics"][0]["collected_at"] = json::array({"/nowhere"});
  EXPECT_THROW(plan_from_json(doc), ParseError);

  doc = fixtures::small_plan_json();
  doc["goals"][0]["object"] = "";
  EXPECT_THROW(plan_from_json(doc), Error);
}

TEST(DeriveCollectionPlan, OneMetricOnThreeLeavesGivesThreeSheets) {
  GqmPlan plan;
  plan.steps = StepTree({"/a/x", "/a/y", "/b"});
  plan.goals.push_back(formulate_goal("o", "p", "v", "c", std::nullopt, "G1"));
  Metric effort;
  effort.metric_id = "effort";
  effort.unit = "h";
  effort.max = 10;
  effort.goal_ids = {"G1"};
  effort.collected_at = plan.steps.leaves();
  plan.metrics.push_back(effort);

  auto sheets = derive_collection_plan(plan);
  // Oracle: the mapping table has one row per (metric, leaf).
  std::set<std::string> expected(effort.collected_at.begin(), effort.collected_at.end());
  ASSERT_EQ(sheets.size(), expected.size());
  for (const auto& s : sheets) {
    EXPECT_TRUE(expected.count(s.step_path));
    EXPECT_EQ(s.metric_ids, std::vector<std::string>{"effort"});
  }
}

TEST(DeriveCollectionPlan, MetricsOnTheSameStepShareASheet) {
  auto sheets = derive_collection_plan(fixtures::small_plan());
  auto code = std::find_if(sheets.begin(), sheets.end(), [](const auto& s) { return s.step_path == "/impl/code"; });
  ASSERT_NE(code, sheets.end());
  EXPECT_EQ(code->metric_ids, (std::vector<std::string>{"defects", "effort"}));
  EXPECT_EQ(sheets.size(), 4u);
}

TEST(DeriveCollectionPlan, PreconditionsAndUncoveredMetrics) {
  auto plan = fixtures::small_plan();
  plan.metrics.clear();
  EXPECT_THROW(derive_collection_plan(plan), PreconditionViolation);

  plan = fixtures::small_plan();
  plan.metrics[1].collected_at.clear();
  try {
    derive_collection_plan(plan);
    FAIL() << "expected UncoveredMetric";
  } catch (const UncoveredMetric& e) {
    EXPECT_EQ(e.metrics(), std::vector<std::string>{"defects"});
  }
}

VisualizationCatena effort_only_catena() {
  return catena_from_json(json::parse(R"({
    "id": "vc", "version": 1,
    "data_entries": [{"id": "effort_data", "metric": "effort"}],
    "function_instances": [
      {"id": "by_phase", "technique": "aggregate", "params": {"depth": 1}, "inputs": ["effort_data"]}
    ],
    "view_instances": [
      {"id": "pm", "mechanism": "table", "role": "project manager", "title": "Effort",
       "inputs": ["by_phase"]}
    ]
  })"));
}

TEST(GoalCoverage, EffortOnlyCatenaLeavesDefectsAndTheQaGoalUncovered) {
  auto plan = fixtures::small_plan();
  auto vc = effort_only_catena();
  auto report = check_goal_coverage(plan, vc);

  // Oracle: collected metrics minus metrics consumed through data entries.
  std::set<std::string> collected, consumed;
  for (const auto& m : plan.metrics) collected.insert(m.metric_id);
  for (const auto& d : vc.data_entries) consumed.insert(d.metric_id);
  std::vector<std::string> expected;
  std::set_difference(collected.begin(), collected.end(), consumed.begin(), consumed.end(),
                      std::back_inserter(expected));

  EXPECT_EQ(report.unconsumed_metrics, expected);
  EXPECT_EQ(report.unsupported_goals, std::vector<std::string>{"G2"});
  EXPECT_TRUE(report.untraceable_views.empty());
  EXPECT_TRUE(report.unknown_metrics.empty());
}

TEST(GoalCoverage, EmptyPlanAndCatenaGiveEmptyReport) {
  EXPECT_TRUE(check_goal_coverage(GqmPlan{}, VisualizationCatena{}).empty());
}

TEST(GoalCoverage, RoleTitlesAndAnnotationsTrace) {
  auto plan = fixtures::small_plan();
  auto vc = effort_only_catena();
  vc.view_instances[0].role_id = "pm";
  EXPECT_EQ(check_goal_coverage(plan, vc).untraceable_views, std::vector<std::string>{"pm"});

  RoleTable roles;
  roles.add({"pm", "project manager", Scope::kAllGroups});
  EXPECT_TRUE(check_goal_coverage(plan, vc, &roles).untraceable_views.empty());

  vc.view_instances[0].goal_id = "G1";
  EXPECT_TRUE(check_goal_coverage(plan, vc).untraceable_views.empty());
}

TEST(GoalCoverage, UnknownCatenaMetricReported) {
  auto vc = effort_only_catena();
  vc.data_entries.push_back({"velocity_data", "velocity"});
  EXPECT_EQ(check_goal_coverage(fixtures::small_plan(), vc).unknown_metrics, std::vector<std::string>{"velocity"});
}

}  // namespace
}  // namespace spcc

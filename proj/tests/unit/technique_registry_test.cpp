#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "spcc/catena.hpp"
#include "spcc/error.hpp"
#include "spcc/technique_registry.hpp"

namespace spcc {
namespace {

TEST(TechniqueRegistry, ExactlyTheFiveBuiltins) {
  auto registry = TechniqueRegistry::with_builtins();
  EXPECT_EQ(registry.ids(), (std::vector<std::string>{"aggregate", "compare_to_baseline", "monitor",
                                                      "predict_course", "tolerance_range_check"}));
}

TEST(TechniqueRegistry, DuplicateRegistrationRejected) {
  auto registry = TechniqueRegistry::with_builtins();
  TechniqueDescriptor d{"tolerance_range_check", TechniquePurpose::kCheck, {}, {{ValueKind::kRawSeries}},
                        ValueKind::kSummary, {}};
  EXPECT_THROW(registry.register_technique(d, [](const TechniqueContext&) { return Value{Summary{}}; }),
               DuplicateTechnique);
}

TEST(TechniqueRegistry, FreshTechniqueMakesItsCatenaValid) {
  auto registry = TechniqueRegistry::with_builtins();
  auto vc = catena_from_json(nlohmann::json::parse(R"({
    "id": "vc", "data_entries": [{"id": "e", "metric": "effort"}],
    "function_instances": [{"id": "f", "technique": "median", "inputs": ["e"]}],
    "view_instances": [{"id": "v", "mechanism": "table", "role": "project manager", "inputs": ["f"]}]
  })"));
  auto plan = fixtures::small_plan();
  EXPECT_FALSE(validate_catena(vc, registry, plan).is_valid());

  TechniqueDescriptor d{"median", TechniquePurpose::kMonitor, {}, {{ValueKind::kRawSeries}}, ValueKind::kSummary, {}};
  registry.register_technique(d, [](const TechniqueContext&) { return Value{Summary{}}; });
  EXPECT_TRUE(validate_catena(vc, registry, plan).is_valid());
}

TEST(CheckParams, TypesRangesChoicesAndCrossRule) {
  auto registry = TechniqueRegistry::with_builtins();
  const auto& tol = registry.find("tolerance_range_check")->descriptor;

  ParamMap ok{{"baseline", std::string("effort")}, {"warn", 0.1}, {"violation", 0.2}};
  EXPECT_TRUE(check_params(tol, ok).empty());

  ParamMap swapped{{"baseline", std::string("effort")}, {"warn", 0.3}, {"violation", 0.2}};
  EXPECT_FALSE(check_params(tol, swapped).empty());

  ParamMap bad_mode = ok;
  bad_mode["mode"] = std::string("sideways");
  ASSERT_EQ(check_params(tol, bad_mode).size(), 1u);
  EXPECT_EQ(check_params(tol, bad_mode)[0].param, "mode");

  ParamMap unknown = ok;
  unknown["colour"] = std::string("red");
  EXPECT_EQ(check_params(tol, unknown)[0].param, "colour");

  ParamMap missing{{"warn", 0.1}, {"violation", 0.2}};
  EXPECT_EQ(check_params(tol, missing)[0].param, "baseline");

  const auto& agg = registry.find("aggregate")->descriptor;
  EXPECT_FALSE(check_params(agg, {{"depth", std::int64_t{-1}}}).empty());
  EXPECT_FALSE(check_params(agg, {{"depth", 1.5}}).empty());
  EXPECT_TRUE(check_params(agg, {{"depth", std::int64_t{2}}}).empty());
}

TEST(CheckParams, DefaultsApplied) {
  auto registry = TechniqueRegistry::with_builtins();
  const auto& predict = registry.find("predict_course")->descriptor;
  auto params = with_defaults(predict, {});
  EXPECT_EQ(integer_param(params, "horizon"), 3);
  EXPECT_EQ(string_param(params, "model"), "linear-least-squares");
  EXPECT_FALSE(bool_param(params, "cumulative"));
}

}  // namespace
}  // namespace spcc

#include <gtest/gtest.h>

#include "spcc/error.hpp"
#include "spcc/step_path.hpp"

namespace spcc {
namespace {

TEST(StepPath, Validity) {
  EXPECT_TRUE(is_valid_step_path("/"));
  EXPECT_TRUE(is_valid_step_path("/design/ui"));
  EXPECT_FALSE(is_valid_step_path(""));
  EXPECT_FALSE(is_valid_step_path("design"));
  EXPECT_FALSE(is_valid_step_path("/design/"));
  EXPECT_FALSE(is_valid_step_path("//design"));
}

TEST(StepPath, DepthPrefixAndParent) {
  EXPECT_EQ(step_depth("/"), 0u);
  EXPECT_EQ(step_depth("/design"), 1u);
  EXPECT_EQ(step_depth("/design/ui/forms"), 3u);
  EXPECT_EQ(step_prefix("/design/ui/forms", 1), "/design");
  EXPECT_EQ(step_prefix("/design/ui/forms", 0), "/");
  EXPECT_EQ(step_prefix("/design", 3), "/design");
  EXPECT_EQ(parent_step("/design/ui"), "/design");
  EXPECT_EQ(parent_step("/design"), "/");
}

TEST(StepPath, IsUnderRespectsSegmentBoundaries) {
  EXPECT_TRUE(is_under("/design/ui", "/design"));
  EXPECT_TRUE(is_under("/design", "/design"));
  EXPECT_TRUE(is_under("/design", "/"));
  EXPECT_FALSE(is_under("/designer", "/design"));
  EXPECT_FALSE(is_under("/design", "/design/ui"));
}

TEST(StepTree, AddsAncestorsImplicitly) {
  StepTree tree({"/design/ui", "/design/db", "/impl"});
  EXPECT_TRUE(tree.contains("/"));
  EXPECT_TRUE(tree.contains("/design"));
  EXPECT_EQ(tree.children("/design"), (std::vector<std::string>{"/design/db", "/design/ui"}));
  EXPECT_EQ(tree.leaves(), (std::vector<std::string>{"/design/db", "/design/ui", "/impl"}));
  EXPECT_EQ(tree.max_depth(), 2u);
  EXPECT_THROW(tree.add("bad"), ParseError);
}

}  // namespace
}  // namespace spcc

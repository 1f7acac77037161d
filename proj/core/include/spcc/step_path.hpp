#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace spcc {

// Process steps are addressed by slash paths: "/" is the root,
// "/design/review" is the "review" activity of the "design" phase.

bool is_valid_step_path(std::string_view path);

// Number of segments below the root: "/" -> 0, "/design" -> 1.
std::size_t step_depth(std::string_view path);

// Ancestor of `path` at `depth`; returns `path` itself when it is shallower.
std::string step_prefix(std::string_view path, std::size_t depth);

// True when `path` equals `ancestor` or lies below it.
bool is_under(std::string_view path, std::string_view ancestor);

std::string parent_step(std::string_view path);

// Rooted tree of process steps. Adding a path implicitly adds its ancestors.
class StepTree {
 public:
  StepTree();
  explicit StepTree(const std::vector<std::string>& paths);

  // Throws ParseError on a malformed path.
  void add(std::string_view path);

  bool contains(std::string_view path) const;
  std::vector<std::string> children(std::string_view path) const;
  std::vector<std::string> leaves() const;
  std::size_t max_depth() const;

  // All paths including "/", in lexicographic order.
  const std::set<std::string, std::less<>>& paths() const { return paths_; }

  bool operator==(const StepTree&) const = default;

 private:
  std::set<std::string, std::less<>> paths_;
};

}  // namespace spcc

#include "spcc/step_path.hpp"

#include <algorithm>

#include "spcc/error.hpp"

namespace spcc {

bool is_valid_step_path(std::string_view path) {
  if (path.empty() || path.front() != '/') return false;
  if (path == "/") return true;
  if (path.back() == '/') return false;
  // No empty segments, no whitespace-only segments.
  std::size_t start = 1;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    if (end == start) return false;
    start = end + 1;
  }
  return true;
}

std::size_t step_depth(std::string_view path) {
  if (path == "/" || path.empty()) return 0;
  return static_cast<std::size_t>(std::count(path.begin(), path.end(), '/'));
}

std::string step_prefix(std::string_view path, std::size_t depth) {
  if (depth == 0) return "/";
  std::size_t seen = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] != '/') continue;
    if (seen == depth) return std::string(path.substr(0, i));
    ++seen;
  }
  return std::string(path);
}

bool is_under(std::string_view path, std::string_view ancestor) {
  if (ancestor == "/") return !path.empty() && path.front() == '/';
  if (path.size() < ancestor.size()) return false;
  if (path.substr(0, ancestor.size()) != ancestor) return false;
  return path.size() == ancestor.size() || path[ancestor.size()] == '/';
}

std::string parent_step(std::string_view path) {
  if (path == "/") return "/";
  auto pos = path.rfind('/');
  if (pos == 0 || pos == std::string_view::npos) return "/";
  return std::string(path.substr(0, pos));
}

StepTree::StepTree() { paths_.insert("/"); }

StepTree::StepTree(const std::vector<std::string>& paths) : StepTree() {
  for (const auto& p : paths) add(p);
}

void StepTree::add(std::string_view path) {
  if (!is_valid_step_path(path)) {
    throw ParseError("invalid process step path '" + std::string(path) + "'");
  }
  std::string current(path);
  while (paths_.insert(current).second && current != "/") {
    current = parent_step(current);
  }
}

bool StepTree::contains(std::string_view path) const {
  return paths_.find(path) != paths_.end();
}

std::vector<std::string> StepTree::children(std::string_view path) const {
  std::vector<std::string> out;
  const std::size_t depth = step_depth(path);
  for (const auto& p : paths_) {
    if (p != path && is_under(p, path) && step_depth(p) == depth + 1) out.push_back(p);
  }
  return out;
}

std::vector<std::string> StepTree::leaves() const {
  std::vector<std::string> out;
  for (const auto& p : paths_) {
    if (children(p).empty()) out.push_back(p);
  }
  return out;
}

std::size_t StepTree::max_depth() const {
  std::size_t depth = 0;
  for (const auto& p : paths_) depth = std::max(depth, step_depth(p));
  return depth;
}

}  // namespace spcc

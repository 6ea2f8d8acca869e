#include "leadrisk/tree.h"

#include <cmath>
#include <limits>
#include <utility>

#include "leadrisk/error.h"
#include "leadrisk/features.h"

namespace leadrisk {

int Tree::split(int i, int feature, double threshold, bool missing_left) {
  Require(std::isfinite(threshold), "tree: non-finite threshold", ErrorKind::kInternal);
  const int left = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  nodes_.emplace_back();
  TreeNode& n = nodes_[static_cast<std::size_t>(i)];
  n.feature = feature;
  n.threshold = threshold;
  n.missing_left = missing_left;
  n.left = left;
  n.right = left + 1;
  return left;
}

int Tree::leaf_index(std::span<const double> row) const {
  int i = 0;
  for (;;) {
    const TreeNode& n = nodes_[static_cast<std::size_t>(i)];
    if (n.is_leaf()) return i;
    const double v = row[static_cast<std::size_t>(n.feature)];
    const bool go_left = IsMissing(v) ? n.missing_left : v <= n.threshold;
    i = go_left ? n.left : n.right;
  }
}

int Tree::depth() const {
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int best = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    const TreeNode& n = nodes_[static_cast<std::size_t>(i)];
    if (n.is_leaf()) {
      best = std::max(best, d);
    } else {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return best;
}

std::size_t Tree::leaf_count() const {
  std::size_t count = 0;
  for (const auto& n : nodes_) count += n.is_leaf();
  return count;
}

nlohmann::json Tree::to_json() const {
  std::vector<int> feature, left, right;
  std::vector<double> threshold, value;
  std::vector<int> missing_left;
  for (const auto& n : nodes_) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    missing_left.push_back(n.missing_left ? 1 : 0);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"missing_left", missing_left},
          {"left", left},       {"right", right},         {"value", value}};
}

Tree Tree::FromJson(const nlohmann::json& j) {
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto missing_left = j.at("missing_left").get<std::vector<int>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const std::size_t n = feature.size();
  Require(n > 0 && threshold.size() == n && missing_left.size() == n && left.size() == n &&
              right.size() == n && value.size() == n,
          "tree: inconsistent node arrays", ErrorKind::kModelCompat);
  Tree t;
  t.nodes_.resize(n);
  const int count = static_cast<int>(n);
  for (std::size_t i = 0; i < n; ++i) {
    TreeNode& node = t.nodes_[i];
    node.feature = feature[i];
    node.threshold = threshold[i];
    node.missing_left = missing_left[i] != 0;
    node.left = left[i];
    node.right = right[i];
    node.value = value[i];
    if (!node.is_leaf()) {
      // Children always come after their parent, which rules out cycles.
      Require(node.left > static_cast<int>(i) && node.left < count && node.right > static_cast<int>(i) &&
                  node.right < count && node.feature >= 0,
              "tree: malformed node links", ErrorKind::kModelCompat);
    }
  }
  return t;
}

double SplitThreshold(double lo, double hi) {
  if (IsMissing(lo)) return std::nextafter(hi, -std::numeric_limits<double>::infinity());
  double mid = lo + (hi - lo) / 2.0;
  if (!(mid < hi)) mid = lo;
  return mid;
}

}  // namespace leadrisk

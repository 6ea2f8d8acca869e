#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace leadrisk {

// Binary decision tree stored as a flat node array; node 0 is the root.
// Internal nodes send a row left iff value <= threshold, except that the
// missing sentinel follows `missing_left`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  bool missing_left = true;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return left < 0; }
};

class Tree {
 public:
  Tree() { nodes_.emplace_back(); }

  std::span<const TreeNode> nodes() const { return nodes_; }
  TreeNode& node(int i) { return nodes_.at(static_cast<std::size_t>(i)); }
  const TreeNode& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }

  // Turns leaf `i` into an internal node with two fresh leaves; returns the
  // index of the left child (right is left + 1).
  int split(int i, int feature, double threshold, bool missing_left);

  int leaf_index(std::span<const double> row) const;
  double predict(std::span<const double> row) const { return nodes_[leaf_index(row)].value; }

  int depth() const;
  std::size_t leaf_count() const;

  nlohmann::json to_json() const;
  static Tree FromJson(const nlohmann::json& j);

 private:
  std::vector<TreeNode> nodes_;
};

// Threshold separating two consecutive sorted values lo < hi so that lo goes
// left and hi goes right under the <= rule.
double SplitThreshold(double lo, double hi);

}  // namespace leadrisk

#pragma once

#include <vector>

#include "boostr/core.hpp"

namespace boostr {

/// Split convention: x[feature] <= threshold goes left.
struct SplitRule {
  int feature = 0;  // 0-based
  double threshold = 0.0;
};

/// Node of a binary regression tree. Internal nodes carry a split rule and
/// the gain it achieved; leaves carry either a curve (static mode) or a
/// (u+v) x q spline coefficient block (dynamic mode).
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  double gain = 0.0;
  int left = -1;
  int right = -1;
  ArrayXd leaf_values;
  MatrixXd beta;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int n_leaves() const {
    int n = 0;
    for (const auto& node : nodes) n += node.is_leaf();
    return n;
  }

  // Index of the leaf x routes to.
  int route(const VectorXd& x) const {
    int i = 0;
    while (!nodes[i].is_leaf()) i = (x[nodes[i].feature] <= nodes[i].threshold) ? nodes[i].left : nodes[i].right;
    return i;
  }
};

}  // namespace boostr

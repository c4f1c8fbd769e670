/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cbrkit/core.hpp"
#include "cbrkit/model.hpp"

namespace cbrkit::cart {

enum class SplitStyle {
  Best,             // exhaustive midpoint thresholds
  RandomThreshold,  // one uniform threshold per candidate feature
};

struct TreeParams {
  std::optional<int> max_depth;  // unbounded when absent
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  /// Candidate features per split; 0 means all allowed features.
  std::size_t max_features = 0;
  /// Features the tree may split on; empty means every column.
  std::vector<std::size_t> allowed_features;
  SplitStyle split_style = SplitStyle::Best;
  std::uint64_t seed = 0;

  void validate(std::size_t n_features) const;
};

/// ceil(sqrt(d)) candidate features.
std::size_t sqrt_features(std::size_t d);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0;   // leaf prediction (mean target or boosting weight)
  int count = 0;      // training rows reaching the node
  double gain = 0;    // split score of an internal node

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary regression tree; x[feature] <= threshold goes left.
class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes);

  double predict(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  int depth() const;
  std::size_t leaf_count() const;

  nlohmann::json to_json() const;
  static Tree from_json(const nlohmann::json& j);

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

/// Grows an SSE-minimizing tree on the given rows (duplicates allowed, as in
/// a bootstrap sample). Equal-score splits resolve to the lowest feature
/// index, then the smallest threshold.
Tree fit_tree(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
              const TreeParams& params);
Tree fit_tree(const Matrix& x, std::span<const double> y, const TreeParams& params);

class TreeRegressor final : public Regressor {
 public:
  explicit TreeRegressor(Tree tree) : tree_(std::move(tree)) {}

  double predict_row(std::span<const double> x) const override { return tree_.predict(x); }
  nlohmann::json to_json() const override;
  static std::shared_ptr<const Regressor> from_json(const nlohmann::json& j);

  const Tree& tree() const noexcept { return tree_; }

 private:
  Tree tree_;
};

}  // namespace cbrkit::cart

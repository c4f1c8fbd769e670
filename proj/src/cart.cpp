/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "cbrkit/cart.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cbrkit/rng.hpp"

namespace cbrkit::cart {

void TreeParams::validate(std::size_t n_features) const {
  if (max_depth && *max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be >= 1");
  if (min_samples_split < 2) throw Error(ErrorCode::InvalidArgument, "min_samples_split must be >= 2");
  if (min_samples_leaf < 1) throw Error(ErrorCode::InvalidArgument, "min_samples_leaf must be >= 1");
  if (max_features > n_features) {
    throw Error(ErrorCode::InvalidArgument, "max_features exceeds the number of features");
  }
  for (auto f : allowed_features) {
    if (f >= n_features) throw Error(ErrorCode::InvalidArgument, "allowed feature out of range");
  }
}

std::size_t sqrt_features(std::size_t d) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d)))));
}

Tree::Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error(ErrorCode::InvalidArgument, "a tree needs at least one node");
  const int n = static_cast<int>(nodes_.size());
  for (const auto& node : nodes_) {
    if (!node.is_leaf() && (node.left <= 0 || node.left >= n || node.right <= 0 || node.right >= n)) {
      throw Error(ErrorCode::Parse, "tree node has an invalid child index");
    }
  }
}

double Tree::predict(std::span<const double> x) const {
  const TreeNode* node = &nodes_[0];
  while (!node->is_leaf()) {
    node = &nodes_[x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right];
  }
  return node->value;
}

int Tree::depth() const {
  std::vector<int> depth(nodes_.size(), 0);
  int deepest = 0;
  // Children always follow their parent in storage order.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (!nodes_[i].is_leaf()) {
      depth[static_cast<std::size_t>(nodes_[i].left)] = depth[i] + 1;
      depth[static_cast<std::size_t>(nodes_[i].right)] = depth[i] + 1;
    }
  }
  return deepest;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(std::ranges::count_if(nodes_, [](const TreeNode& n) { return n.is_leaf(); }));
}

nlohmann::json Tree::to_json() const {
  nlohmann::json feature = nlohmann::json::array(), threshold = nlohmann::json::array(),
                 left = nlohmann::json::array(), right = nlohmann::json::array(),
                 value = nlohmann::json::array(), count = nlohmann::json::array(),
                 gain = nlohmann::json::array();
  for (const auto& n : nodes_) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
    count.push_back(n.count);
    gain.push_back(n.gain);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
          {"value", value},     {"count", count},         {"gain", gain}};
}

Tree Tree::from_json(const nlohmann::json& j) {
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const auto count = j.at("count").get<std::vector<int>>();
  const auto gain = j.at("gain").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n ||
      count.size() != n || gain.size() != n) {
    throw Error(ErrorCode::Parse, "tree arrays differ in length");
  }
  std::vector<TreeNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = TreeNode{feature[i], threshold[i], left[i], right[i], value[i], count[i], gain[i]};
  }
  return Tree(std::move(nodes));
}

namespace {

class Builder {
 public:
  Builder(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
          const TreeParams& p)
      : x_(x), y_(y), p_(p), rng_(p.seed) {
    if (p.allowed_features.empty()) {
      features_.resize(x.cols());
      std::iota(features_.begin(), features_.end(), std::size_t{0});
    } else {
      features_ = p.allowed_features;
      std::ranges::sort(features_);
    }
    // Best splits keep one row order per feature, sorted by value; splits
    // partition every order stably so each node sees its rows already sorted.
    // Random thresholds need no ordering and keep a single row list.
    const bool sorted = p.split_style == SplitStyle::Best;
    order_.resize(sorted ? features_.size() : 1);
    order_[0].assign(rows.begin(), rows.end());
    for (std::size_t k = 0; sorted && k < features_.size(); ++k) {
      order_[k].assign(rows.begin(), rows.end());
      const std::size_t f = features_[k];
      std::ranges::sort(order_[k], [&](std::size_t a, std::size_t b) {
        return x_(a, f) < x_(b, f) || (x_(a, f) == x_(b, f) && a < b);
      });
    }
    tmp_.reserve(rows.size());
  }

  Tree run() {
    build(0, order_[0].size(), 0);
    return Tree(std::move(nodes_));
  }

 private:
  struct Candidate {
    int feature = -1;
    double threshold = 0;
    double gain = 0;
  };

  // Positions into features_, ascending.
  std::vector<std::size_t> candidate_positions() {
    const std::size_t k = p_.max_features;
    if (k == 0 || k >= features_.size()) {
      std::vector<std::size_t> all(features_.size());
      std::iota(all.begin(), all.end(), std::size_t{0});
      return all;
    }
    return sample_without_replacement(features_.size(), k, rng_);
  }

  // Best midpoint split of one feature; residuals are centred node targets.
  void scan_best(std::size_t k, std::size_t begin, std::size_t end, double mean, double total,
                 double tol, Candidate& best) const {
    const std::size_t f = features_[k];
    const auto& ord = order_[k];
    const std::size_t m = end - begin;
    const auto min_leaf = static_cast<std::size_t>(p_.min_samples_leaf);
    const double base = total * total / static_cast<double>(m);
    double left_sum = 0;
    double cur = x_(ord[begin], f);
    for (std::size_t i = begin; i + 1 < end; ++i) {
      left_sum += y_[ord[i]] - mean;
      const double next = x_(ord[i + 1], f);
      if (cur == next) continue;
      const double prev = cur;
      cur = next;
      const std::size_t nl = i + 1 - begin, nr = m - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / static_cast<double>(nl) +
                          right_sum * right_sum / static_cast<double>(nr) - base;
      if (gain > best.gain + tol) {
        double t = 0.5 * (prev + next);
        if (!(t < next)) t = prev;
        best = {static_cast<int>(f), t, gain};
      }
    }
  }

  void scan_random(std::size_t k, std::size_t begin, std::size_t end, double mean, double total,
                   double tol, Candidate& best) {
    const std::size_t f = features_[k];
    const auto& rows = order_[0];
    double lo = x_(rows[begin], f), hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      lo = std::min(lo, x_(rows[i], f));
      hi = std::max(hi, x_(rows[i], f));
    }
    if (!(hi > lo)) return;
    double t = lo + uniform01(rng_) * (hi - lo);
    if (!(t < hi)) t = lo;
    const std::size_t m = end - begin;
    std::size_t nl = 0;
    double left_sum = 0;
    for (std::size_t i = begin; i < end; ++i) {
      if (x_(rows[i], f) <= t) {
        ++nl;
        left_sum += y_[rows[i]] - mean;
      }
    }
    const std::size_t nr = m - nl;
    const auto min_leaf = static_cast<std::size_t>(p_.min_samples_leaf);
    if (nl < min_leaf || nr < min_leaf) return;
    const double right_sum = total - left_sum;
    const double gain = left_sum * left_sum / static_cast<double>(nl) +
                        right_sum * right_sum / static_cast<double>(nr) -
                        total * total / static_cast<double>(m);
    if (gain > best.gain + tol) best = {static_cast<int>(f), t, gain};
  }

  // Stable partition of every order's [begin, end) by the chosen split.
  std::size_t partition(std::size_t begin, std::size_t end, std::size_t f, double threshold) {
    std::size_t mid = begin;
    for (auto& ord : order_) {
      tmp_.clear();
      std::size_t w = begin;
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t r = ord[i];
        if (x_(r, f) <= threshold) {
          ord[w++] = r;
        } else {
          tmp_.push_back(r);
        }
      }
      std::ranges::copy(tmp_, ord.begin() + static_cast<std::ptrdiff_t>(w));
      mid = w;
    }
    return mid;
  }

  int build(std::size_t begin, std::size_t end, int depth) {
    const auto& rows = order_[0];
    const std::size_t m = end - begin;
    double sum = 0, lo = y_[rows[begin]], hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = y_[rows[i]];
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double mean = sum / static_cast<double>(m);

    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{-1, 0.0, -1, -1, mean, static_cast<int>(m), 0.0});

    const bool depth_reached = p_.max_depth && depth >= *p_.max_depth;
    if (lo == hi || depth_reached || m < static_cast<std::size_t>(p_.min_samples_split) ||
        m < 2 * static_cast<std::size_t>(p_.min_samples_leaf)) {
      return id;
    }

    double total = 0, sse = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const double r = y_[rows[i]] - mean;
      total += r;
      sse += r * r;
    }
    const double tol = 1e-12 * sse;

    Candidate best;
    for (auto k : candidate_positions()) {
      if (p_.split_style == SplitStyle::Best) {
        scan_best(k, begin, end, mean, total, tol, best);
      } else {
        scan_random(k, begin, end, mean, total, tol, best);
      }
    }
    if (best.feature < 0) return id;

    const std::size_t mid = partition(begin, end, static_cast<std::size_t>(best.feature), best.threshold);

    nodes_[static_cast<std::size_t>(id)].feature = best.feature;
    nodes_[static_cast<std::size_t>(id)].threshold = best.threshold;
    nodes_[static_cast<std::size_t>(id)].gain = best.gain;
    const int left = build(begin, mid, depth + 1);
    const int right = build(mid, end, depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  const Matrix& x_;
  std::span<const double> y_;
  const TreeParams& p_;
  Rng rng_;
  std::vector<std::size_t> features_;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<std::size_t> tmp_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

Tree fit_tree(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
              const TreeParams& params) {
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "cannot fit a tree on an empty dataset");
  if (y.size() != x.rows()) throw Error(ErrorCode::InvalidArgument, "tree targets do not match rows");
  params.validate(x.cols());
  return Builder(x, y, rows, params).run();
}

Tree fit_tree(const Matrix& x, std::span<const double> y, const TreeParams& params) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit_tree(x, y, rows, params);
}

nlohmann::json TreeRegressor::to_json() const {
  return {{"kind", "tree"}, {"tree", tree_.to_json()}};
}

std::shared_ptr<const Regressor> TreeRegressor::from_json(const nlohmann::json& j) {
  return std::make_shared<TreeRegressor>(Tree::from_json(j.at("tree")));
}

}  // namespace cbrkit::cart

/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <algorithm>
#include <cmath>
#include <numeric>

#include "cbrkit/ensembles.hpp"
#include "cbrkit/rng.hpp"

namespace cbrkit::ensembles {

BoostRegressor::BoostRegressor(double base, double learning_rate, std::vector<cart::Tree> trees)
    : base_(base), learning_rate_(learning_rate), trees_(std::move(trees)) {}

double BoostRegressor::predict_row(std::span<const double> x) const {
  return predict_staged(x, trees_.size());
}

double BoostRegressor::predict_staged(std::span<const double> x, std::size_t stages) const {
  double f = base_;
  const std::size_t n = std::min(stages, trees_.size());
  for (std::size_t m = 0; m < n; ++m) f += learning_rate_ * trees_[m].predict(x);
  return f;
}

nlohmann::json BoostRegressor::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"kind", "boost"}, {"base", base_}, {"learning_rate", learning_rate_}, {"trees", trees}};
}

std::shared_ptr<const Regressor> BoostRegressor::from_json(const nlohmann::json& j) {
  std::vector<cart::Tree> trees;
  for (const auto& t : j.at("trees")) trees.push_back(cart::Tree::from_json(t));
  return std::make_shared<BoostRegressor>(j.at("base").get<double>(),
                                          j.at("learning_rate").get<double>(), std::move(trees));
}

double structure_gain(double g_left, double h_left, double g_right, double h_right, double lambda) {
  const double g = g_left + g_right, h = h_left + h_right;
  return 0.5 * (g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) -
                g * g / (h + lambda));
}

namespace {

void check_boost(const Matrix& x, std::span<const double> y, const BoostParams& p) {
  if (x.rows() == 0) throw Error(ErrorCode::InvalidArgument, "cannot fit on an empty dataset");
  if (y.size() != x.rows()) throw Error(ErrorCode::InvalidArgument, "targets do not match rows");
  if (p.n_estimators < 0) throw Error(ErrorCode::InvalidArgument, "n_estimators must be >= 0");
  if (!(p.learning_rate > 0)) throw Error(ErrorCode::InvalidArgument, "learning_rate must be > 0");
  if (p.max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be >= 1");
  if (!(p.subsample > 0 && p.subsample <= 1)) {
    throw Error(ErrorCode::InvalidArgument, "subsample must lie in (0, 1]");
  }
}

double mean_of(std::span<const double> y) {
  return std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
}

std::vector<std::size_t> stage_rows(std::size_t n, double subsample, Rng& rng) {
  if (subsample >= 1.0) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
  }
  const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(subsample * static_cast<double>(n))));
  return sample_without_replacement(n, k, rng);
}

// Rows of every column sorted by value (then row index), computed once per fit.
std::vector<std::vector<std::size_t>> presort(const Matrix& x) {
  std::vector<std::vector<std::size_t>> out(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    out[f].resize(x.rows());
    std::iota(out[f].begin(), out[f].end(), std::size_t{0});
    std::ranges::sort(out[f], [&](std::size_t a, std::size_t b) {
      return x(a, f) < x(b, f) || (x(a, f) == x(b, f) && a < b);
    });
  }
  return out;
}

/// Greedy second-order tree on gradients g with unit hessians. Node values
/// are the optimal leaf weights -G / (H + lambda); node gains exclude gamma.
class GradientTreeBuilder {
 public:
  GradientTreeBuilder(const Matrix& x, std::span<const double> g,
                      const std::vector<std::vector<std::size_t>>& sorted,
                      std::span<const std::size_t> rows, std::vector<std::size_t> features,
                      int max_depth, double lambda, double gamma)
      : x_(x), g_(g), features_(std::move(features)), max_depth_(max_depth), lambda_(lambda),
        gamma_(gamma) {
    std::vector<char> in_stage(x.rows(), 0);
    for (auto r : rows) in_stage[r] = 1;
    order_.resize(features_.size());
    for (std::size_t k = 0; k < features_.size(); ++k) {
      order_[k].reserve(rows.size());
      for (auto r : sorted[features_[k]]) {
        if (in_stage[r]) order_[k].push_back(r);
      }
    }
    tmp_.reserve(rows.size());
  }

  cart::Tree run() {
    build(0, order_[0].size(), 0);
    return cart::Tree(std::move(nodes_));
  }

 private:
  int build(std::size_t begin, std::size_t end, int depth) {
    const auto& rows = order_[0];
    const std::size_t m = end - begin;
    double sum = 0;
    for (std::size_t i = begin; i < end; ++i) sum += g_[rows[i]];
    const double hess = static_cast<double>(m);
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(cart::TreeNode{-1, 0.0, -1, -1, -sum / (hess + lambda_), static_cast<int>(m), 0.0});
    if (depth >= max_depth_ || m < 2) return id;

    const double mean = sum / hess;
    double sse = 0;
    for (std::size_t i = begin; i < end; ++i) sse += (g_[rows[i]] - mean) * (g_[rows[i]] - mean);
    const double tol = 0.5e-12 * sse;

    int best_f = -1;
    double best_t = 0, best_gain = gamma_;
    for (std::size_t k = 0; k < features_.size(); ++k) {
      const std::size_t f = features_[k];
      const auto& ord = order_[k];
      double gl = 0;
      for (std::size_t i = begin; i + 1 < end; ++i) {
        gl += g_[ord[i]];
        const double a = x_(ord[i], f), b = x_(ord[i + 1], f);
        if (a == b) continue;
        const double hl = static_cast<double>(i + 1 - begin);
        const double gain = structure_gain(gl, hl, sum - gl, hess - hl, lambda_);
        if (gain > best_gain + tol) {
          best_gain = gain;
          best_f = static_cast<int>(f);
          best_t = 0.5 * (a + b);
          if (!(best_t < b)) best_t = a;
        }
      }
    }
    if (best_f < 0) return id;

    const auto f = static_cast<std::size_t>(best_f);
    std::size_t mid = begin;
    for (auto& ord : order_) {
      tmp_.clear();
      std::size_t w = begin;
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t r = ord[i];
        if (x_(r, f) <= best_t) {
          ord[w++] = r;
        } else {
          tmp_.push_back(r);
        }
      }
      std::ranges::copy(tmp_, ord.begin() + static_cast<std::ptrdiff_t>(w));
      mid = w;
    }
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = best_f;
    node.threshold = best_t;
    node.gain = best_gain;
    const int left = build(begin, mid, depth + 1);
    const int right = build(mid, end, depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  const Matrix& x_;
  std::span<const double> g_;
  std::vector<std::size_t> features_;
  int max_depth_;
  double lambda_, gamma_;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<std::size_t> tmp_;
  std::vector<cart::TreeNode> nodes_;
};

}  // namespace

std::shared_ptr<const BoostRegressor> fit_gradient_boosting(const Matrix& x,
                                                            std::span<const double> y,
                                                            const BoostParams& p) {
  check_boost(x, y, p);
  const std::size_t n = x.rows();
  const double base = mean_of(y);
  std::vector<double> f(n, base), residual(n);
  std::vector<cart::Tree> trees;
  trees.reserve(static_cast<std::size_t>(p.n_estimators));

  cart::TreeParams tp;
  tp.max_depth = p.max_depth;
  for (int m = 0; m < p.n_estimators; ++m) {
    Rng rng(derive_seed(p.seed, static_cast<std::uint64_t>(m)));
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - f[i];
    const auto rows = stage_rows(n, p.subsample, rng);
    auto tree = cart::fit_tree(x, residual, rows, tp);
    for (std::size_t i = 0; i < n; ++i) f[i] += p.learning_rate * tree.predict(x.row(i));
    trees.push_back(std::move(tree));
  }
  return std::make_shared<BoostRegressor>(base, p.learning_rate, std::move(trees));
}

std::shared_ptr<const BoostRegressor> fit_regularized_boosting(const Matrix& x,
                                                               std::span<const double> y,
                                                               const RegBoostParams& p) {
  check_boost(x, y, p.boost);
  if (!(p.lambda >= 0)) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
  if (!(p.gamma >= 0)) throw Error(ErrorCode::InvalidArgument, "gamma must be >= 0");
  if (!(p.colsample_bytree > 0 && p.colsample_bytree <= 1)) {
    throw Error(ErrorCode::InvalidArgument, "colsample_bytree must lie in (0, 1]");
  }
  const std::size_t n = x.rows(), d = x.cols();
  const double base = mean_of(y);
  const double lr = p.boost.learning_rate;
  std::vector<double> f(n, base), grad(n);
  std::vector<cart::Tree> trees;
  trees.reserve(static_cast<std::size_t>(p.boost.n_estimators));
  const auto n_cols = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(p.colsample_bytree * static_cast<double>(d))), 1, d);

  const auto sorted = presort(x);
  for (int m = 0; m < p.boost.n_estimators; ++m) {
    Rng rng(derive_seed(p.boost.seed, static_cast<std::uint64_t>(m)));
    for (std::size_t i = 0; i < n; ++i) grad[i] = f[i] - y[i];
    const auto rows = stage_rows(n, p.boost.subsample, rng);
    auto cols = sample_without_replacement(d, n_cols, rng);
    auto tree = GradientTreeBuilder(x, grad, sorted, rows, std::move(cols), p.boost.max_depth,
                                    p.lambda, p.gamma)
                    .run();
    for (std::size_t i = 0; i < n; ++i) f[i] += lr * tree.predict(x.row(i));
    trees.push_back(std::move(tree));
  }
  return std::make_shared<BoostRegressor>(base, lr, std::move(trees));
}

}  // namespace cbrkit::ensembles

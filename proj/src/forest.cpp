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
#include "cbrkit/parallel.hpp"
#include "cbrkit/rng.hpp"

namespace cbrkit::ensembles {

ForestRegressor::ForestRegressor(std::vector<cart::Tree> trees,
                                 std::vector<std::vector<std::size_t>> feature_subsets)
    : trees_(std::move(trees)), feature_subsets_(std::move(feature_subsets)) {
  if (trees_.empty()) throw Error(ErrorCode::InvalidArgument, "a forest needs at least one tree");
  if (!feature_subsets_.empty() && feature_subsets_.size() != trees_.size()) {
    throw Error(ErrorCode::InvalidArgument, "one feature subset per tree expected");
  }
}

double ForestRegressor::predict_row(std::span<const double> x) const {
  double sum = 0;
  for (const auto& t : trees_) sum += t.predict(x);
  return sum / static_cast<double>(trees_.size());
}

nlohmann::json ForestRegressor::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"kind", "forest"}, {"trees", trees}, {"feature_subsets", feature_subsets_}};
}

std::shared_ptr<const Regressor> ForestRegressor::from_json(const nlohmann::json& j) {
  std::vector<cart::Tree> trees;
  for (const auto& t : j.at("trees")) trees.push_back(cart::Tree::from_json(t));
  return std::make_shared<ForestRegressor>(
      std::move(trees), j.at("feature_subsets").get<std::vector<std::vector<std::size_t>>>());
}

namespace {

void check_training(const Matrix& x, std::span<const double> y) {
  if (x.rows() == 0) throw Error(ErrorCode::InvalidArgument, "cannot fit on an empty dataset");
  if (y.size() != x.rows()) throw Error(ErrorCode::InvalidArgument, "targets do not match rows");
}

std::shared_ptr<const ForestRegressor> grow_forest(const Matrix& x, std::span<const double> y,
                                                   const ForestParams& p) {
  check_training(x, y);
  if (p.n_estimators < 1) throw Error(ErrorCode::InvalidArgument, "n_estimators must be >= 1");
  p.tree.validate(x.cols());
  std::vector<cart::Tree> trees(static_cast<std::size_t>(p.n_estimators));
  parallel_for(trees.size(), [&](std::size_t t) {
    Rng rng(derive_seed(p.seed, 2 * t));
    std::vector<std::size_t> rows;
    if (p.bootstrap) {
      rows = sample_with_replacement(x.rows(), x.rows(), rng);
    } else {
      rows.resize(x.rows());
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    cart::TreeParams tp = p.tree;
    tp.seed = derive_seed(p.seed, 2 * t + 1);
    trees[t] = cart::fit_tree(x, y, rows, tp);
  });
  return std::make_shared<ForestRegressor>(std::move(trees), std::vector<std::vector<std::size_t>>{});
}

}  // namespace

std::shared_ptr<const ForestRegressor> fit_random_forest(const Matrix& x, std::span<const double> y,
                                                         const ForestParams& p) {
  return grow_forest(x, y, p);
}

std::shared_ptr<const ForestRegressor> fit_extra_trees(const Matrix& x, std::span<const double> y,
                                                       ForestParams p) {
  p.tree.split_style = cart::SplitStyle::RandomThreshold;
  p.bootstrap = false;
  return grow_forest(x, y, p);
}

std::shared_ptr<const ForestRegressor> fit_bagging(const Matrix& x, std::span<const double> y,
                                                   const BaggingParams& p) {
  check_training(x, y);
  if (p.n_estimators < 1) throw Error(ErrorCode::InvalidArgument, "n_estimators must be >= 1");
  if (!(p.max_samples > 0 && p.max_samples <= 1)) {
    throw Error(ErrorCode::InvalidArgument, "max_samples must lie in (0, 1]");
  }
  if (!(p.max_features > 0 && p.max_features <= 1)) {
    throw Error(ErrorCode::InvalidArgument, "max_features must lie in (0, 1]");
  }
  const auto n_rows = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(p.max_samples * static_cast<double>(x.rows()))));
  const auto n_cols = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(p.max_features * static_cast<double>(x.cols()))));

  const auto count = static_cast<std::size_t>(p.n_estimators);
  std::vector<cart::Tree> trees(count);
  std::vector<std::vector<std::size_t>> subsets(count);
  parallel_for(count, [&](std::size_t t) {
    Rng rng(derive_seed(p.seed, t));
    subsets[t] = sample_without_replacement(x.cols(), n_cols, rng);
    const auto rows = sample_with_replacement(x.rows(), n_rows, rng);
    cart::TreeParams tp;
    tp.allowed_features = subsets[t];
    trees[t] = cart::fit_tree(x, y, rows, tp);
  });
  return std::make_shared<ForestRegressor>(std::move(trees), std::move(subsets));
}

}  // namespace cbrkit::ensembles

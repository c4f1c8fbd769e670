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
#include <utility>
#include <vector>

#include "cbrkit/cart.hpp"
#include "cbrkit/model.hpp"

namespace cbrkit::ensembles {

// ---------------------------------------------------------------------------
// Averaging ensembles: random forest, extra trees, bagging
// ---------------------------------------------------------------------------

struct ForestParams {
  int n_estimators = 100;
  cart::TreeParams tree;  // seed is ignored; per-tree seeds derive from `seed`
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct BaggingParams {
  int n_estimators = 10;
  double max_samples = 1.0;   // fraction of rows drawn with replacement
  double max_features = 1.0;  // fraction of columns fixed per estimator
  std::uint64_t seed = 0;
};

/// Mean of member trees. Members may be restricted to a feature subset
/// (bagging), recorded so the model documents what each tree could see.
class ForestRegressor final : public Regressor {
 public:
  ForestRegressor(std::vector<cart::Tree> trees, std::vector<std::vector<std::size_t>> feature_subsets);

  double predict_row(std::span<const double> x) const override;
  nlohmann::json to_json() const override;
  static std::shared_ptr<const Regressor> from_json(const nlohmann::json& j);

  const std::vector<cart::Tree>& trees() const noexcept { return trees_; }
  const std::vector<std::vector<std::size_t>>& feature_subsets() const noexcept {
    return feature_subsets_;
  }

 private:
  std::vector<cart::Tree> trees_;
  std::vector<std::vector<std::size_t>> feature_subsets_;
};

std::shared_ptr<const ForestRegressor> fit_random_forest(const Matrix& x, std::span<const double> y,
                                                         const ForestParams& p);
/// Random-threshold trees on the full sample.
std::shared_ptr<const ForestRegressor> fit_extra_trees(const Matrix& x, std::span<const double> y,
                                                       ForestParams p);
std::shared_ptr<const ForestRegressor> fit_bagging(const Matrix& x, std::span<const double> y,
                                                   const BaggingParams& p);

// ---------------------------------------------------------------------------
// Additive boosting: squared-error gradient boosting and its second-order
// regularized variant
// ---------------------------------------------------------------------------

struct BoostParams {
  int n_estimators = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  double subsample = 1.0;
  std::uint64_t seed = 0;
};

struct RegBoostParams {
  BoostParams boost;
  double gamma = 0.0;  // minimum split gain
  double colsample_bytree = 1.0;
  double lambda = 1.0;  // L2 penalty on leaf weights
};

/// F(x) = base + learning_rate * sum of trees.
class BoostRegressor final : public Regressor {
 public:
  BoostRegressor(double base, double learning_rate, std::vector<cart::Tree> trees);

  double predict_row(std::span<const double> x) const override;
  /// Prediction using only the first `stages` trees.
  double predict_staged(std::span<const double> x, std::size_t stages) const;
  nlohmann::json to_json() const override;
  static std::shared_ptr<const Regressor> from_json(const nlohmann::json& j);

  double base() const noexcept { return base_; }
  double learning_rate() const noexcept { return learning_rate_; }
  const std::vector<cart::Tree>& trees() const noexcept { return trees_; }

 private:
  double base_;
  double learning_rate_;
  std::vector<cart::Tree> trees_;
};

std::shared_ptr<const BoostRegressor> fit_gradient_boosting(const Matrix& x,
                                                            std::span<const double> y,
                                                            const BoostParams& p);
std::shared_ptr<const BoostRegressor> fit_regularized_boosting(const Matrix& x,
                                                               std::span<const double> y,
                                                               const RegBoostParams& p);

/// Gain of splitting gradient/hessian sums into (L, R), before gamma.
double structure_gain(double g_left, double h_left, double g_right, double h_right, double lambda);

// ---------------------------------------------------------------------------
// AdaBoost.R2
// ---------------------------------------------------------------------------

enum class AdaLoss { Linear, Square, Exponential };

struct AdaParams {
  int n_estimators = 50;
  double learning_rate = 1.0;
  AdaLoss loss = AdaLoss::Linear;
  int max_depth = 3;
  std::uint64_t seed = 0;
};

/// Smallest value whose cumulative weight (in ascending value order) reaches
/// half the total weight.
double weighted_median(std::span<const double> values, std::span<const double> weights);

class AdaBoostRegressor final : public Regressor {
 public:
  AdaBoostRegressor(std::vector<cart::Tree> trees, std::vector<double> weights);

  double predict_row(std::span<const double> x) const override;
  nlohmann::json to_json() const override;
  static std::shared_ptr<const Regressor> from_json(const nlohmann::json& j);

  const std::vector<cart::Tree>& trees() const noexcept { return trees_; }
  const std::vector<double>& estimator_weights() const noexcept { return weights_; }

 private:
  std::vector<cart::Tree> trees_;
  std::vector<double> weights_;
};

std::shared_ptr<const AdaBoostRegressor> fit_adaboost_r2(const Matrix& x, std::span<const double> y,
                                                         const AdaParams& p);

// ---------------------------------------------------------------------------
// Voting and stacking
// ---------------------------------------------------------------------------

struct MemberSpec {
  Family family;
  ParamSet params;
};

struct CompositeSpec {
  std::vector<MemberSpec> members;
  std::vector<double> weights;  // voting only; empty means equal weights
  int stacking_folds = 5;
  std::uint64_t seed = 0;
};

/// Tuned random forest, extra trees and gradient boosting members.
CompositeSpec default_voting_spec();
/// The voting members plus k-nearest neighbours.
CompositeSpec default_stacking_spec();

class VotingRegressor final : public Regressor {
 public:
  VotingRegressor(std::vector<FittedModel> members, std::vector<double> weights);

  double predict_row(std::span<const double> x) const override;
  nlohmann::json to_json() const override;
  static std::shared_ptr<const Regressor> from_json(const nlohmann::json& j);

  const std::vector<FittedModel>& members() const noexcept { return members_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  std::vector<FittedModel> members_;
  std::vector<double> weights_;
};

class StackingRegressor final : public Regressor {
 public:
  StackingRegressor(std::vector<FittedModel> members, double intercept, std::vector<double> coef);

  double predict_row(std::span<const double> x) const override;
  nlohmann::json to_json() const override;
  static std::shared_ptr<const Regressor> from_json(const nlohmann::json& j);

  const std::vector<FittedModel>& members() const noexcept { return members_; }
  double intercept() const noexcept { return intercept_; }
  const std::vector<double>& coef() const noexcept { return coef_; }

 private:
  std::vector<FittedModel> members_;
  double intercept_;
  std::vector<double> coef_;
};

std::shared_ptr<const VotingRegressor> fit_voting(const Matrix& x, std::span<const double> y,
                                                  const CompositeSpec& spec);
std::shared_ptr<const StackingRegressor> fit_stacking(const Matrix& x, std::span<const double> y,
                                                      const CompositeSpec& spec);

/// Least-squares fit of y on the columns of `features` with an intercept.
/// Columns are centred first and the slope system takes its minimum-norm
/// solution, so constant columns get zero weight.
std::pair<double, std::vector<double>> least_squares_with_intercept(const Matrix& features,
                                                                     std::span<const double> y);

}  // namespace cbrkit::ensembles

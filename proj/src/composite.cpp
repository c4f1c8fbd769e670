/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "cbrkit/ensembles.hpp"
#include "cbrkit/parallel.hpp"
#include "cbrkit/rng.hpp"
#include "cbrkit/selection.hpp"

namespace cbrkit::ensembles {
namespace {

void check_members(const CompositeSpec& spec) {
  if (spec.members.empty()) {
    throw Error(ErrorCode::InvalidArgument, "a composite model needs at least one member");
  }
  for (const auto& m : spec.members) {
    if (m.family == Family::Voting || m.family == Family::Stacking) {
      throw Error(ErrorCode::InvalidArgument, "composite members cannot themselves be composites");
    }
  }
}

std::vector<FittedModel> fit_members(const CompositeSpec& spec, const Matrix& x,
                                     std::span<const double> y) {
  std::vector<std::optional<FittedModel>> fitted(spec.members.size());
  parallel_for(spec.members.size(), [&](std::size_t i) {
    fitted[i] = fit_model(spec.members[i].family, spec.members[i].params, x, y,
                          derive_seed(spec.seed, i));
  });
  std::vector<FittedModel> out;
  for (auto& f : fitted) out.push_back(std::move(*f));
  return out;
}

nlohmann::json members_json(const std::vector<FittedModel>& members) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : members) out.push_back(m.to_json());
  return out;
}

std::vector<FittedModel> members_from_json(const nlohmann::json& j) {
  std::vector<FittedModel> out;
  for (const auto& m : j) out.push_back(FittedModel::from_json(m));
  return out;
}

}  // namespace

CompositeSpec default_voting_spec() {
  CompositeSpec spec;
  for (auto f : {Family::RandomForest, Family::ExtraTrees, Family::GradientBoosting}) {
    spec.members.push_back({f, anchor_params(f)});
  }
  return spec;
}

CompositeSpec default_stacking_spec() {
  CompositeSpec spec = default_voting_spec();
  spec.members.push_back({Family::KNeighbors, anchor_params(Family::KNeighbors)});
  return spec;
}

VotingRegressor::VotingRegressor(std::vector<FittedModel> members, std::vector<double> weights)
    : members_(std::move(members)), weights_(std::move(weights)) {
  if (members_.empty() || weights_.size() != members_.size()) {
    throw Error(ErrorCode::InvalidArgument, "voting needs one weight per member");
  }
}

double VotingRegressor::predict_row(std::span<const double> x) const {
  double sum = 0, total = 0;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    sum += weights_[i] * members_[i].predict_row(x);
    total += weights_[i];
  }
  return sum / total;
}

nlohmann::json VotingRegressor::to_json() const {
  return {{"kind", "voting"}, {"weights", weights_}, {"members", members_json(members_)}};
}

std::shared_ptr<const Regressor> VotingRegressor::from_json(const nlohmann::json& j) {
  return std::make_shared<VotingRegressor>(members_from_json(j.at("members")),
                                           j.at("weights").get<std::vector<double>>());
}

std::shared_ptr<const VotingRegressor> fit_voting(const Matrix& x, std::span<const double> y,
                                                  const CompositeSpec& spec) {
  check_members(spec);
  std::vector<double> weights = spec.weights;
  if (weights.empty()) weights.assign(spec.members.size(), 1.0);
  if (weights.size() != spec.members.size()) {
    throw Error(ErrorCode::InvalidArgument, "voting needs one weight per member");
  }
  double total = 0;
  for (double w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidArgument, "voting weights must be finite and >= 0");
    }
    total += w;
  }
  if (!(total > 0)) throw Error(ErrorCode::InvalidArgument, "voting weights sum to zero");
  return std::make_shared<VotingRegressor>(fit_members(spec, x, y), std::move(weights));
}

StackingRegressor::StackingRegressor(std::vector<FittedModel> members, double intercept,
                                     std::vector<double> coef)
    : members_(std::move(members)), intercept_(intercept), coef_(std::move(coef)) {
  if (members_.empty() || coef_.size() != members_.size()) {
    throw Error(ErrorCode::InvalidArgument, "stacking needs one coefficient per member");
  }
}

double StackingRegressor::predict_row(std::span<const double> x) const {
  double out = intercept_;
  for (std::size_t i = 0; i < members_.size(); ++i) out += coef_[i] * members_[i].predict_row(x);
  return out;
}

nlohmann::json StackingRegressor::to_json() const {
  return {{"kind", "stacking"},
          {"intercept", intercept_},
          {"coef", coef_},
          {"members", members_json(members_)}};
}

std::shared_ptr<const Regressor> StackingRegressor::from_json(const nlohmann::json& j) {
  return std::make_shared<StackingRegressor>(members_from_json(j.at("members")),
                                             j.at("intercept").get<double>(),
                                             j.at("coef").get<std::vector<double>>());
}

std::pair<double, std::vector<double>> least_squares_with_intercept(const Matrix& features,
                                                                     std::span<const double> y) {
  const auto n = static_cast<Eigen::Index>(features.rows());
  const auto k = static_cast<Eigen::Index>(features.cols());
  if (n == 0 || static_cast<std::size_t>(n) != y.size()) {
    throw Error(ErrorCode::InvalidArgument, "least squares needs matching non-empty inputs");
  }
  Eigen::MatrixXd a(n, k);
  Eigen::VectorXd b(n);
  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<double> col_mean(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index c = 0; c < k; ++c) {
    double m = 0;
    for (Eigen::Index r = 0; r < n; ++r) m += features(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    col_mean[static_cast<std::size_t>(c)] = m / static_cast<double>(n);
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    b(r) = y[static_cast<std::size_t>(r)] - y_mean;
    for (Eigen::Index c = 0; c < k; ++c) {
      a(r, c) = features(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) -
                col_mean[static_cast<std::size_t>(c)];
    }
  }
  const Eigen::VectorXd slope = a.completeOrthogonalDecomposition().solve(b);
  std::vector<double> coef(static_cast<std::size_t>(k));
  double intercept = y_mean;
  for (Eigen::Index c = 0; c < k; ++c) {
    coef[static_cast<std::size_t>(c)] = slope(c);
    intercept -= slope(c) * col_mean[static_cast<std::size_t>(c)];
  }
  return {intercept, coef};
}

std::shared_ptr<const StackingRegressor> fit_stacking(const Matrix& x, std::span<const double> y,
                                                      const CompositeSpec& spec) {
  check_members(spec);
  if (spec.stacking_folds < 2) throw Error(ErrorCode::InvalidArgument, "stacking needs >= 2 folds");
  const std::size_t n = x.rows(), k = spec.members.size();
  const auto plan = make_folds(n, static_cast<std::size_t>(spec.stacking_folds), spec.seed);

  // Out-of-fold member predictions form the meta-features.
  Matrix meta(n, k);
  parallel_for(plan.size() * k, [&](std::size_t task) {
    const auto& fold = plan[task / k];
    const std::size_t member = task % k;
    const Matrix fx = x.select_rows(fold.train);
    std::vector<double> fy(fold.train.size());
    for (std::size_t i = 0; i < fold.train.size(); ++i) fy[i] = y[fold.train[i]];
    const auto model = fit_model(spec.members[member].family, spec.members[member].params, fx, fy,
                                 derive_seed(spec.seed, member));
    for (auto r : fold.validation) meta(r, member) = model.predict_row(x.row(r));
  });

  auto [intercept, coef] = least_squares_with_intercept(meta, y);
  return std::make_shared<StackingRegressor>(fit_members(spec, x, y), intercept, std::move(coef));
}

}  // namespace cbrkit::ensembles

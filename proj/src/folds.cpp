/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <algorithm>
#include <numeric>

#include "cbrkit/rng.hpp"
#include "cbrkit/selection.hpp"

namespace cbrkit {

FoldPlan make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "cross-validation needs at least 2 folds");
  if (k > n) {
    throw Error(ErrorCode::InvalidArgument, "cannot make " + std::to_string(k) + " folds from " +
                                                std::to_string(n) + " rows");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(std::span(order), rng);

  FoldPlan plan(k);
  std::vector<std::size_t> owner(n);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = n / k + (f < n % k ? 1 : 0);
    for (std::size_t i = 0; i < len; ++i) owner[order[pos + i]] = f;
    pos += len;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      (owner[i] == f ? plan[f].validation : plan[f].train).push_back(i);
    }
  }
  return plan;
}

std::size_t grid_size(const ParamGrid& grid) {
  std::size_t total = 1;
  for (const auto& [key, values] : grid) total *= values.size();
  return total;
}

std::vector<ParamSet> expand_grid(const ParamGrid& grid) {
  for (const auto& [key, values] : grid) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "grid entry '" + key + "' has no values");
  }
  std::vector<ParamSet> out{ParamSet{}};
  for (const auto& [key, values] : grid) {
    std::vector<ParamSet> next;
    next.reserve(out.size() * values.size());
    for (const auto& partial : out) {
      for (const auto& v : values) {
        auto p = partial;
        p[key] = v;
        next.push_back(std::move(p));
      }
    }
    out = std::move(next);
  }
  return out;
}

ParamGrid default_grid(Family family) {
  using I = std::int64_t;
  using S = std::string;
  const ParamValue none = std::monostate{};
  switch (family) {
    case Family::RandomForest:
      return {{"max_depth", {I{5}, I{10}, none}},
              {"max_features", {S("sqrt"), none}},
              {"min_samples_leaf", {I{1}, I{2}}},
              {"min_samples_split", {I{2}, I{5}, I{10}}},
              {"n_estimators", {I{100}, I{300}}}};
    case Family::ExtraTrees:
      return {{"max_depth", {I{5}, I{10}, none}},
              {"min_samples_split", {I{2}, I{5}, I{10}}},
              {"n_estimators", {I{100}, I{300}}}};
    case Family::Bagging:
      return {{"max_features", {0.5, 0.7, 1.0}},
              {"max_samples", {0.7, 0.9, 1.0}},
              {"n_estimators", {I{50}, I{100}, I{200}}}};
    case Family::DecisionTree:
      return {{"max_depth", {I{3}, I{5}, I{10}, none}},
              {"min_samples_leaf", {I{1}, I{2}, I{4}}},
              {"min_samples_split", {I{2}, I{5}, I{10}}}};
    case Family::KNeighbors:
      return {{"metric", {S("manhattan"), S("euclidean")}},
              {"n_neighbors", {I{3}, I{5}, I{7}, I{9}}},
              {"weights", {S("uniform"), S("distance")}}};
    case Family::SVR:
      return {{"C", {I{1}, I{10}, I{100}, I{1000}}},
              {"epsilon", {0.05, 0.1, 0.5}},
              {"kernel", {S("rbf")}}};
    case Family::GradientBoosting:
      return {{"learning_rate", {0.05, 0.1, 0.2}},
              {"max_depth", {I{3}, I{5}}},
              {"n_estimators", {I{100}, I{300}}},
              {"subsample", {0.7, 1.0}}};
    case Family::XGBoost:
      return {{"colsample_bytree", {0.7, 1.0}},
              {"gamma", {0.0, 0.1}},
              {"learning_rate", {0.01, 0.1}},
              {"max_depth", {I{3}, I{5}}},
              {"n_estimators", {I{300}}},
              {"subsample", {0.7, 1.0}}};
    case Family::AdaBoost:
      return {{"learning_rate", {0.01, 0.1, 1.0}},
              {"loss", {S("linear"), S("square"), S("exponential")}},
              {"n_estimators", {I{50}, I{100}, I{200}}}};
    case Family::MLPRegressor:
      return {{"activation", {S("relu"), S("tanh")}},
              {"alpha", {0.0001, 0.001}},
              {"hidden_layer_sizes", {std::vector<I>{100}}},
              {"learning_rate", {S("constant")}},
              {"solver", {S("adam")}}};
    case Family::Voting:
    case Family::Stacking:
      return {};
  }
  return {};
}

}  // namespace cbrkit

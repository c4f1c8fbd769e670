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

double weighted_median(std::span<const double> values, std::span<const double> weights) {
  if (values.empty() || values.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "weighted median needs matching non-empty inputs");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double cumulative = 0;
  for (auto i : order) {
    cumulative += weights[i];
    if (cumulative >= 0.5 * total) return values[i];
  }
  return values[order.back()];
}

AdaBoostRegressor::AdaBoostRegressor(std::vector<cart::Tree> trees, std::vector<double> weights)
    : trees_(std::move(trees)), weights_(std::move(weights)) {
  if (trees_.empty() || trees_.size() != weights_.size()) {
    throw Error(ErrorCode::InvalidArgument, "AdaBoost needs one weight per estimator");
  }
}

double AdaBoostRegressor::predict_row(std::span<const double> x) const {
  std::vector<double> preds(trees_.size());
  for (std::size_t i = 0; i < trees_.size(); ++i) preds[i] = trees_[i].predict(x);
  return weighted_median(preds, weights_);
}

nlohmann::json AdaBoostRegressor::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"kind", "adaboost"}, {"trees", trees}, {"weights", weights_}};
}

std::shared_ptr<const Regressor> AdaBoostRegressor::from_json(const nlohmann::json& j) {
  std::vector<cart::Tree> trees;
  for (const auto& t : j.at("trees")) trees.push_back(cart::Tree::from_json(t));
  return std::make_shared<AdaBoostRegressor>(std::move(trees), j.at("weights").get<std::vector<double>>());
}

std::shared_ptr<const AdaBoostRegressor> fit_adaboost_r2(const Matrix& x, std::span<const double> y,
                                                         const AdaParams& p) {
  const std::size_t n = x.rows();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "cannot fit on an empty dataset");
  if (y.size() != n) throw Error(ErrorCode::InvalidArgument, "targets do not match rows");
  if (p.n_estimators < 1) throw Error(ErrorCode::InvalidArgument, "n_estimators must be >= 1");
  if (!(p.learning_rate > 0)) throw Error(ErrorCode::InvalidArgument, "learning_rate must be > 0");

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> cdf(n), loss(n), pred(n);
  std::vector<cart::Tree> trees;
  std::vector<double> est_weights;
  cart::TreeParams tp;
  tp.max_depth = p.max_depth;

  for (int round = 0; round < p.n_estimators; ++round) {
    Rng rng(derive_seed(p.seed, static_cast<std::uint64_t>(round)));
    // Weighted bootstrap of n rows.
    std::partial_sum(w.begin(), w.end(), cdf.begin());
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) {
      const double u = uniform01(rng) * cdf.back();
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      r = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), n - 1);
    }
    auto tree = cart::fit_tree(x, y, rows, tp);

    double max_err = 0;
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = tree.predict(x.row(i));
      max_err = std::max(max_err, std::abs(pred[i] - y[i]));
    }
    double avg_loss = 0;
    if (max_err > 0) {
      for (std::size_t i = 0; i < n; ++i) {
        const double e = std::abs(pred[i] - y[i]) / max_err;
        switch (p.loss) {
          case AdaLoss::Linear: loss[i] = e; break;
          case AdaLoss::Square: loss[i] = e * e; break;
          case AdaLoss::Exponential: loss[i] = 1.0 - std::exp(-e); break;
        }
        avg_loss += w[i] * loss[i];
      }
    }

    if (avg_loss <= 0) {
      // Perfect fit on the weighted sample: it decides alone from here on.
      trees.push_back(std::move(tree));
      est_weights.push_back(1.0);
      break;
    }
    if (avg_loss >= 0.5) {
      // Too weak to receive a positive weight; kept only if nothing else exists.
      if (trees.empty()) {
        trees.push_back(std::move(tree));
        est_weights.push_back(1.0);
      }
      break;
    }

    const double beta = avg_loss / (1.0 - avg_loss);
    trees.push_back(std::move(tree));
    est_weights.push_back(p.learning_rate * std::log(1.0 / beta));
    if (round + 1 == p.n_estimators) break;

    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::pow(beta, (1.0 - loss[i]) * p.learning_rate);
      total += w[i];
    }
    if (!(total > 0) || !std::isfinite(total)) {
      throw Error(ErrorCode::Degenerate, "AdaBoost sample weights collapsed to zero at round " +
                                             std::to_string(round + 1));
    }
    for (auto& v : w) v /= total;
  }
  return std::make_shared<AdaBoostRegressor>(std::move(trees), std::move(est_weights));
}

}  // namespace cbrkit::ensembles

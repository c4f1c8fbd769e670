/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <algorithm>
#include <cmath>
#include <numeric>

#include "cbrkit/kernel.hpp"

namespace cbrkit::kernel {

double distance(std::span<const double> a, std::span<const double> b, Metric metric) {
  double acc = 0;
  if (metric == Metric::Manhattan) {
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc;
  }
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

KnnRegressor::KnnRegressor(Matrix x, std::vector<double> y, KnnParams params)
    : x_(std::move(x)), y_(std::move(y)), params_(params) {
  if (params_.k < 1) throw Error(ErrorCode::InvalidArgument, "n_neighbors must be >= 1");
  if (static_cast<std::size_t>(params_.k) > x_.rows()) {
    throw Error(ErrorCode::InvalidArgument, "n_neighbors (" + std::to_string(params_.k) +
                                                ") exceeds the training size (" +
                                                std::to_string(x_.rows()) + ")");
  }
  if (y_.size() != x_.rows()) throw Error(ErrorCode::InvalidArgument, "targets do not match rows");
}

std::vector<std::size_t> KnnRegressor::neighbors(std::span<const double> x) const {
  const std::size_t n = x_.rows();
  std::vector<std::pair<double, std::size_t>> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = {distance(x_.row(i), x, params_.metric), i};
  const auto k = static_cast<std::size_t>(params_.k);
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = d[i].second;
  return out;
}

double KnnRegressor::predict_row(std::span<const double> x) const {
  const auto nn = neighbors(x);
  if (params_.weights == Weights::Uniform) {
    double sum = 0;
    for (auto i : nn) sum += y_[i];
    return sum / static_cast<double>(nn.size());
  }
  // Exact matches dominate: average them alone.
  double exact_sum = 0;
  std::size_t exact = 0;
  double wsum = 0, num = 0;
  for (auto i : nn) {
    const double dist = distance(x_.row(i), x, params_.metric);
    if (dist == 0) {
      exact_sum += y_[i];
      ++exact;
    } else {
      wsum += 1.0 / dist;
      num += y_[i] / dist;
    }
  }
  if (exact > 0) return exact_sum / static_cast<double>(exact);
  return num / wsum;
}

nlohmann::json KnnRegressor::to_json() const {
  return {{"kind", "knn"},
          {"k", params_.k},
          {"metric", params_.metric == Metric::Manhattan ? "manhattan" : "euclidean"},
          {"weights", params_.weights == Weights::Distance ? "distance" : "uniform"},
          {"n_features", x_.cols()},
          {"x", std::vector<double>(x_.data().begin(), x_.data().end())},
          {"y", y_}};
}

std::shared_ptr<const Regressor> KnnRegressor::from_json(const nlohmann::json& j) {
  KnnParams p;
  p.k = j.at("k").get<int>();
  p.metric = j.at("metric").get<std::string>() == "manhattan" ? Metric::Manhattan : Metric::Euclidean;
  p.weights = j.at("weights").get<std::string>() == "distance" ? Weights::Distance : Weights::Uniform;
  auto y = j.at("y").get<std::vector<double>>();
  Matrix x(y.size(), j.at("n_features").get<std::size_t>(), j.at("x").get<std::vector<double>>());
  return std::make_shared<KnnRegressor>(std::move(x), std::move(y), p);
}

std::shared_ptr<const KnnRegressor> fit_knn(const Matrix& x, std::span<const double> y,
                                            const KnnParams& params) {
  return std::make_shared<KnnRegressor>(x, std::vector<double>(y.begin(), y.end()), params);
}

}  // namespace cbrkit::kernel

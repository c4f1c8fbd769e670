/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "cbrkit/metrics.hpp"

#include <cmath>
#include <string>

#include "cbrkit/core.hpp"

namespace cbrkit {
namespace {

void check_lengths(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) {
    throw Error(ErrorCode::InvalidArgument, "metric inputs differ in length (" +
                                                std::to_string(y.size()) + " vs " +
                                                std::to_string(yhat.size()) + ")");
  }
  if (y.empty()) throw Error(ErrorCode::InvalidArgument, "metric inputs are empty");
}

}  // namespace

double r2_score(std::span<const double> y, std::span<const double> yhat) {
  check_lengths(y, yhat);
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - yhat[i];
    const double d = y[i] - mean;
    ss_res += r * r;
    ss_tot += d * d;
  }
  if (ss_tot == 0) {
    throw Error(ErrorCode::Degenerate, "R^2 is undefined for a zero-variance target");
  }
  return 1.0 - ss_res / ss_tot;
}

double mae(std::span<const double> y, std::span<const double> yhat) {
  check_lengths(y, yhat);
  double sum = 0;
  for (std::size_t i = 0; i < y.size(); ++i) sum += std::abs(y[i] - yhat[i]);
  return sum / static_cast<double>(y.size());
}

double rmse(std::span<const double> y, std::span<const double> yhat) {
  check_lengths(y, yhat);
  double sum = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - yhat[i];
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(y.size()));
}

Metrics evaluate(std::span<const double> y, std::span<const double> yhat) {
  return {r2_score(y, yhat), mae(y, yhat), rmse(y, yhat)};
}

}  // namespace cbrkit

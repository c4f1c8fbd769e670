/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <span>

namespace cbrkit {

struct Metrics {
  double r2 = 0;
  double mae = 0;
  double rmse = 0;
};

/// Coefficient of determination, 1 - SS_res / SS_tot. Throws a Degenerate
/// error when y has zero variance.
double r2_score(std::span<const double> y, std::span<const double> yhat);
double mae(std::span<const double> y, std::span<const double> yhat);
double rmse(std::span<const double> y, std::span<const double> yhat);

Metrics evaluate(std::span<const double> y, std::span<const double> yhat);

}  // namespace cbrkit

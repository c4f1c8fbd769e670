/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <span>
#include <vector>

#include "json.hpp"

#include "cbrkit/core.hpp"

namespace cbrkit {

/// Per-column z-score transform with population standard deviation. Constant
/// columns keep scale 1 and so map to 0.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(std::vector<double> mean, std::vector<double> scale);

  static Standardizer fit(const Matrix& rows);

  std::size_t size() const noexcept { return mean_.size(); }
  const std::vector<double>& mean() const noexcept { return mean_; }
  /// Divisor per column (1 for constant columns).
  const std::vector<double>& scale() const noexcept { return scale_; }

  Matrix transform(const Matrix& rows) const;
  void transform_row(std::span<const double> in, std::span<double> out) const;
  Matrix inverse_transform(const Matrix& rows) const;

  nlohmann::json to_json() const;
  static Standardizer from_json(const nlohmann::json& j);

  friend bool operator==(const Standardizer&, const Standardizer&) = default;

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

/// Mean and divisor of a single vector under the same rule.
struct Scale1d {
  double mean = 0;
  double scale = 1;
};
Scale1d fit_scale(std::span<const double> values);

}  // namespace cbrkit

/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "cbrkit/standardizer.hpp"

#include <cmath>

namespace cbrkit {

Scale1d fit_scale(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "cannot fit a scale on no values");
  double mean = 0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  const double sd = std::sqrt(var);
  return {mean, sd > 0 ? sd : 1.0};
}

Standardizer::Standardizer(std::vector<double> mean, std::vector<double> scale)
    : mean_(std::move(mean)), scale_(std::move(scale)) {
  if (mean_.size() != scale_.size()) {
    throw Error(ErrorCode::InvalidArgument, "standardizer mean/scale size mismatch");
  }
  for (double s : scale_) {
    if (!(s > 0) || !std::isfinite(s)) {
      throw Error(ErrorCode::InvalidArgument, "standardizer scales must be positive");
    }
  }
}

Standardizer Standardizer::fit(const Matrix& rows) {
  std::vector<double> mean(rows.cols()), scale(rows.cols());
  for (std::size_t c = 0; c < rows.cols(); ++c) {
    const auto col = rows.column(c);
    const auto s = fit_scale(col);
    mean[c] = s.mean;
    scale[c] = s.scale;
  }
  return Standardizer(std::move(mean), std::move(scale));
}

void Standardizer::transform_row(std::span<const double> in, std::span<double> out) const {
  for (std::size_t c = 0; c < mean_.size(); ++c) out[c] = (in[c] - mean_[c]) / scale_[c];
}

Matrix Standardizer::transform(const Matrix& rows) const {
  if (rows.cols() != mean_.size()) {
    throw Error(ErrorCode::InvalidArgument, "standardizer width does not match the rows");
  }
  Matrix out(rows.rows(), rows.cols());
  for (std::size_t r = 0; r < rows.rows(); ++r) transform_row(rows.row(r), out.row(r));
  return out;
}

Matrix Standardizer::inverse_transform(const Matrix& rows) const {
  Matrix out(rows.rows(), rows.cols());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t c = 0; c < rows.cols(); ++c) out(r, c) = rows(r, c) * scale_[c] + mean_[c];
  }
  return out;
}

nlohmann::json Standardizer::to_json() const { return {{"mean", mean_}, {"scale", scale_}}; }

Standardizer Standardizer::from_json(const nlohmann::json& j) {
  return Standardizer(j.at("mean").get<std::vector<double>>(),
                      j.at("scale").get<std::vector<double>>());
}

}  // namespace cbrkit

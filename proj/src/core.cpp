/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "cbrkit/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "cbrkit/rng.hpp"

namespace cbrkit {

SoilSample SoilSample::from_features(std::span<const double> f, std::optional<double> cbr) {
  if (f.size() != kNumFeatures) {
    throw Error(ErrorCode::InvalidArgument, "expected 7 feature values, got " + std::to_string(f.size()));
  }
  return SoilSample{f[0], f[1], f[2], f[3], f[4], f[5], f[6], cbr};
}

std::optional<std::string> check_sample(const SoilSample& s) {
  const auto f = s.features();
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (!std::isfinite(f[i])) return std::string(kFeatureNames[i]) + " is finite";
  }
  if (s.cbr && !std::isfinite(*s.cbr)) return std::string("CBR is finite");
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (i == 5) continue;
    if (f[i] < 0) return std::string(kFeatureNames[i]) + " >= 0";
  }
  if (s.mdd <= 0) return std::string("MDD > 0");
  if (s.cbr && *s.cbr < 0) return std::string("CBR >= 0");
  if (std::abs(s.g + s.s + s.fc - 100.0) > kCompositionTolerance) {
    return std::string("G+S+FC = 100 (within 1.5)");
  }
  if (s.pi > s.ll) return std::string("PI <= LL");
  return std::nullopt;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorCode::InvalidArgument, "matrix data size does not match its shape");
  }
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    std::ranges::copy(row(indices[i]), out.row(i).begin());
  }
  return out;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Dataset::Dataset(std::vector<SoilSample> samples, std::optional<bool> has_target)
    : samples_(std::move(samples)) {
  has_target_ = samples_.empty() ? has_target.value_or(false) : samples_.front().cbr.has_value();
  features_ = Matrix(samples_.size(), kNumFeatures);
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (s.cbr.has_value() != has_target_) {
      throw Error(ErrorCode::Validation,
                  "row " + std::to_string(i + 1) + ": CBR must be present in all rows or none");
    }
    std::ranges::copy(s.features(), features_.row(i).begin());
    if (has_target_) targets_.push_back(*s.cbr);
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<SoilSample> picked;
  picked.reserve(indices.size());
  for (auto i : indices) picked.push_back(samples_.at(i));
  return Dataset(std::move(picked), has_target_);
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count, Rng& rng) {
  if (count > n) throw Error(ErrorCode::InvalidArgument, "sample larger than population");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(pool[i], pool[i + uniform_index(rng, n - i)]);
  }
  pool.resize(count);
  std::ranges::sort(pool);
  return pool;
}

std::vector<std::size_t> sample_with_replacement(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::size_t> out(count);
  for (auto& v : out) v = uniform_index(rng, n);
  return out;
}

double standard_normal(Rng& rng) {
  static const boost::math::normal_distribution<double> unit;
  return boost::math::quantile(unit, uniform_open01(rng));
}

}  // namespace cbrkit

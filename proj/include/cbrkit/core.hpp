/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cbrkit {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Parse,
  Validation,
  Degenerate,
  Numerical,
  Exists,
};

/// Every failure inside the library surfaces as this exception; the C API
/// maps the code onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline constexpr std::size_t kNumFeatures = 7;
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames{
    "G", "S", "FC", "LL", "PI", "MDD", "OMC"};
inline constexpr std::string_view kTargetName = "CBR";

/// Grain-size fractions must sum to 100 within this absolute tolerance.
inline constexpr double kCompositionTolerance = 1.5;

/// One soil record. Units: percent for everything except mdd (kN/m^3).
struct SoilSample {
  double g = 0;    // gravel content
  double s = 0;    // sand content
  double fc = 0;   // fines content
  double ll = 0;   // liquid limit
  double pi = 0;   // plasticity index
  double mdd = 0;  // maximum dry density
  double omc = 0;  // optimum moisture content
  std::optional<double> cbr;

  std::array<double, kNumFeatures> features() const {
    return {g, s, fc, ll, pi, mdd, omc};
  }
  static SoilSample from_features(std::span<const double> f,
                                  std::optional<double> cbr = std::nullopt);
};

/// Returns the name of the first violated record invariant, if any.
std::optional<std::string> check_sample(const SoilSample& sample);

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Matrix select_rows(std::span<const std::size_t> indices) const;
  std::vector<double> column(std::size_t c) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Immutable, ordered collection of soil samples with either all or none of
/// the rows carrying a CBR target.
class Dataset {
 public:
  Dataset() = default;
  /// `has_target` fixes the target flag for empty datasets; otherwise it is
  /// taken from the rows.
  explicit Dataset(std::vector<SoilSample> samples, std::optional<bool> has_target = std::nullopt);

  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  bool has_target() const noexcept { return has_target_; }

  const std::vector<SoilSample>& samples() const noexcept { return samples_; }
  const SoilSample& operator[](std::size_t i) const { return samples_[i]; }

  /// Feature matrix in schema order [G, S, FC, LL, PI, MDD, OMC].
  const Matrix& features() const noexcept { return features_; }
  /// Target vector; empty when the dataset carries no targets.
  std::span<const double> targets() const noexcept { return targets_; }

  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<SoilSample> samples_;
  bool has_target_ = false;
  Matrix features_;
  std::vector<double> targets_;
};

}  // namespace cbrkit

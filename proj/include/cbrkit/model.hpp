/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cbrkit/core.hpp"
#include "cbrkit/params.hpp"
#include "cbrkit/standardizer.hpp"

namespace cbrkit {

/// Fitted learner operating on already-transformed feature rows.
class Regressor {
 public:
  virtual ~Regressor() = default;

  virtual double predict_row(std::span<const double> x) const = 0;
  /// Serialized state; must contain a "kind" field understood by
  /// regressor_from_json.
  virtual nlohmann::json to_json() const = 0;
};

std::shared_ptr<const Regressor> regressor_from_json(const nlohmann::json& j);

/// A trained model of one family. Owns the optional feature standardizer so
/// callers always pass raw features.
class FittedModel {
 public:
  FittedModel(Family family, std::size_t n_features, std::optional<Standardizer> scaler,
              std::shared_ptr<const Regressor> regressor);

  Family family() const noexcept { return family_; }
  std::size_t n_features() const noexcept { return n_features_; }
  const std::optional<Standardizer>& scaler() const noexcept { return scaler_; }
  const Regressor& regressor() const noexcept { return *regressor_; }

  template <class T>
  const T* as() const {
    return dynamic_cast<const T*>(regressor_.get());
  }

  double predict_row(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& x) const;
  std::vector<double> predict(const Dataset& data) const;

  nlohmann::json to_json() const;
  static FittedModel from_json(const nlohmann::json& j);

  /// Versioned text form, see README "Model file format".
  std::string serialize() const;
  static FittedModel deserialize(std::string_view text);

  void save(const std::string& path, bool force) const;
  static FittedModel load(const std::string& path);

 private:
  Family family_;
  std::size_t n_features_;
  std::optional<Standardizer> scaler_;
  std::shared_ptr<const Regressor> regressor_;
};

inline constexpr std::string_view kModelFormatName = "cbrkit-model";
inline constexpr int kModelFormatVersion = 1;

/// Trains a model of `family` with the given hyperparameters. Unspecified
/// parameters take the family defaults; unknown keys are an error.
FittedModel fit_model(Family family, const ParamSet& params, const Matrix& x,
                      std::span<const double> y, std::uint64_t seed);
FittedModel fit_model(Family family, const ParamSet& params, const Dataset& train,
                      std::uint64_t seed);

/// Best hyperparameters reported for each family on the original soil data;
/// used as grid anchors and as voting/stacking member settings.
ParamSet anchor_params(Family family);

}  // namespace cbrkit

/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cbrkit/model.hpp"

namespace cbrkit::neural {

enum class Activation { Relu, Tanh };

struct MlpParams {
  std::vector<int> hidden = {100};
  Activation activation = Activation::Relu;
  double alpha = 0.001;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int batch_size = 200;  // capped at n
  int max_epochs = 1000;
  double tolerance = 1e-4;
  int patience = 10;
  std::uint64_t seed = 0;
};

/// Fully connected network with a single linear output. All weights and
/// biases live in one flat vector; layer l stores its (out x in) weight
/// matrix row-major followed by its bias vector.
class MlpNet {
 public:
  MlpNet() = default;
  MlpNet(std::size_t n_inputs, std::vector<int> hidden, Activation activation);

  std::size_t n_inputs() const noexcept { return layers_.front(); }
  const std::vector<std::size_t>& layer_sizes() const noexcept { return layers_; }
  Activation activation() const noexcept { return activation_; }

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }
  std::size_t n_params() const noexcept { return params_.size(); }

  /// Offset of layer l's weights / biases inside params().
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + layers_[layer] * layers_[layer + 1];
  }
  std::size_t n_layers() const noexcept { return layers_.size() - 1; }

  /// Glorot-uniform weights, zero biases.
  void initialize(std::uint64_t seed);

  double forward(std::span<const double> x) const;

  /// Batch loss 1/2 mean (f(x) - y)^2 + alpha/2 * ||W||^2 (weights only) and
  /// its gradient with respect to params().
  double loss_and_gradient(const Matrix& x, std::span<const double> y,
                           std::span<const std::size_t> rows, double alpha,
                           std::span<double> grad) const;
  double loss(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
              double alpha) const;

  /// Sum of squared weights (biases excluded).
  double weight_norm_sq() const;

  nlohmann::json to_json() const;
  static MlpNet from_json(const nlohmann::json& j);

 private:
  std::vector<std::size_t> layers_;  // n_inputs, hidden..., 1
  std::vector<std::size_t> offsets_;
  Activation activation_ = Activation::Relu;
  std::vector<double> params_;
};

/// Bias-corrected Adam optimizer state.
class Adam {
 public:
  Adam(std::size_t n, double learning_rate, double beta1, double beta2, double epsilon);

  void step(std::span<double> params, std::span<const double> grad);
  long steps() const noexcept { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  double beta1_pow_ = 1.0, beta2_pow_ = 1.0;
  long t_ = 0;
  std::vector<double> m_, v_;
};

/// Network plus the target standardization it was trained under.
class MlpRegressor final : public Regressor {
 public:
  MlpRegressor(MlpNet net, double y_mean, double y_scale, int epochs);

  double predict_row(std::span<const double> x) const override;
  nlohmann::json to_json() const override;
  static std::shared_ptr<const Regressor> from_json(const nlohmann::json& j);

  const MlpNet& net() const noexcept { return net_; }
  int epochs() const noexcept { return epochs_; }

 private:
  MlpNet net_;
  double y_mean_;
  double y_scale_;
  int epochs_;
};

/// Mini-batch Adam training on a standardized target; x is used as given.
std::shared_ptr<const MlpRegressor> fit_mlp(const Matrix& x, std::span<const double> y,
                                            const MlpParams& params);

}  // namespace cbrkit::neural

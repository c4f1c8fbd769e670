/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cbrkit/neural.hpp"
#include "cbrkit/rng.hpp"

namespace cbrkit::neural {
namespace {

double activate(Activation a, double z) {
  return a == Activation::Relu ? (z > 0 ? z : 0.0) : std::tanh(z);
}

// Derivative expressed through the activation output.
double activate_grad(Activation a, double out) {
  return a == Activation::Relu ? (out > 0 ? 1.0 : 0.0) : 1.0 - out * out;
}

}  // namespace

MlpNet::MlpNet(std::size_t n_inputs, std::vector<int> hidden, Activation activation)
    : activation_(activation) {
  if (n_inputs == 0) throw Error(ErrorCode::InvalidArgument, "MLP needs at least one input");
  layers_.push_back(n_inputs);
  for (int h : hidden) {
    if (h < 1) throw Error(ErrorCode::InvalidArgument, "hidden layer sizes must be >= 1");
    layers_.push_back(static_cast<std::size_t>(h));
  }
  layers_.push_back(1);
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    offsets_.push_back(offset);
    offset += layers_[l] * layers_[l + 1] + layers_[l + 1];
  }
  params_.assign(offset, 0.0);
}

void MlpNet::initialize(std::uint64_t seed) {
  Rng rng(seed);
  std::ranges::fill(params_, 0.0);
  for (std::size_t l = 0; l < n_layers(); ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layers_[l] + layers_[l + 1]));
    const std::size_t count = layers_[l] * layers_[l + 1];
    for (std::size_t i = 0; i < count; ++i) {
      params_[offsets_[l] + i] = (2.0 * uniform01(rng) - 1.0) * bound;
    }
  }
}

double MlpNet::forward(std::span<const double> x) const {
  std::vector<double> in(x.begin(), x.end()), out;
  for (std::size_t l = 0; l < n_layers(); ++l) {
    const std::size_t fan_in = layers_[l], fan_out = layers_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    out.assign(fan_out, 0.0);
    const bool last = l + 1 == n_layers();
    for (std::size_t o = 0; o < fan_out; ++o) {
      double z = b[o];
      for (std::size_t i = 0; i < fan_in; ++i) z += w[o * fan_in + i] * in[i];
      out[o] = last ? z : activate(activation_, z);
    }
    in.swap(out);
  }
  return in[0];
}

double MlpNet::weight_norm_sq() const {
  double sum = 0;
  for (std::size_t l = 0; l < n_layers(); ++l) {
    const std::size_t count = layers_[l] * layers_[l + 1];
    for (std::size_t i = 0; i < count; ++i) sum += params_[offsets_[l] + i] * params_[offsets_[l] + i];
  }
  return sum;
}

double MlpNet::loss(const Matrix& x, std::span<const double> y, std::span<const std::size_t> rows,
                    double alpha) const {
  double sq = 0;
  for (auto r : rows) {
    const double d = forward(x.row(r)) - y[r];
    sq += d * d;
  }
  return 0.5 * sq / static_cast<double>(rows.size()) + 0.5 * alpha * weight_norm_sq();
}

double MlpNet::loss_and_gradient(const Matrix& x, std::span<const double> y,
                                 std::span<const std::size_t> rows, double alpha,
                                 std::span<double> grad) const {
  std::ranges::fill(grad, 0.0);
  const std::size_t depth = n_layers();
  std::vector<std::vector<double>> act(depth + 1);
  for (std::size_t l = 0; l <= depth; ++l) act[l].resize(layers_[l]);
  std::vector<double> delta, prev;
  const double inv_b = 1.0 / static_cast<double>(rows.size());

  double sq = 0;
  for (auto r : rows) {
    const auto xr = x.row(r);
    std::copy(xr.begin(), xr.end(), act[0].begin());
    for (std::size_t l = 0; l < depth; ++l) {
      const std::size_t fan_in = layers_[l], fan_out = layers_[l + 1];
      const double* w = params_.data() + weight_offset(l);
      const double* b = params_.data() + bias_offset(l);
      const bool last = l + 1 == depth;
      for (std::size_t o = 0; o < fan_out; ++o) {
        double z = b[o];
        for (std::size_t i = 0; i < fan_in; ++i) z += w[o * fan_in + i] * act[l][i];
        act[l + 1][o] = last ? z : activate(activation_, z);
      }
    }
    const double diff = act[depth][0] - y[r];
    sq += diff * diff;

    delta.assign(1, diff * inv_b);
    for (std::size_t l = depth; l-- > 0;) {
      const std::size_t fan_in = layers_[l], fan_out = layers_[l + 1];
      const double* w = params_.data() + weight_offset(l);
      double* gw = grad.data() + weight_offset(l);
      double* gb = grad.data() + bias_offset(l);
      for (std::size_t o = 0; o < fan_out; ++o) {
        const double d = delta[o];
        gb[o] += d;
        for (std::size_t i = 0; i < fan_in; ++i) gw[o * fan_in + i] += d * act[l][i];
      }
      if (l == 0) break;
      prev.assign(fan_in, 0.0);
      for (std::size_t o = 0; o < fan_out; ++o) {
        const double d = delta[o];
        for (std::size_t i = 0; i < fan_in; ++i) prev[i] += w[o * fan_in + i] * d;
      }
      for (std::size_t i = 0; i < fan_in; ++i) prev[i] *= activate_grad(activation_, act[l][i]);
      delta.swap(prev);
    }
  }

  if (alpha != 0) {
    for (std::size_t l = 0; l < depth; ++l) {
      const std::size_t count = layers_[l] * layers_[l + 1];
      for (std::size_t i = 0; i < count; ++i) grad[offsets_[l] + i] += alpha * params_[offsets_[l] + i];
    }
  }
  return 0.5 * sq * inv_b + 0.5 * alpha * weight_norm_sq();
}

nlohmann::json MlpNet::to_json() const {
  std::vector<int> hidden;
  for (std::size_t l = 1; l + 1 < layers_.size(); ++l) hidden.push_back(static_cast<int>(layers_[l]));
  return {{"n_inputs", layers_.front()},
          {"hidden", hidden},
          {"activation", activation_ == Activation::Relu ? "relu" : "tanh"},
          {"params", params_}};
}

MlpNet MlpNet::from_json(const nlohmann::json& j) {
  const auto act = j.at("activation").get<std::string>();
  if (act != "relu" && act != "tanh") throw Error(ErrorCode::Parse, "unknown activation '" + act + "'");
  MlpNet net(j.at("n_inputs").get<std::size_t>(), j.at("hidden").get<std::vector<int>>(),
             act == "relu" ? Activation::Relu : Activation::Tanh);
  auto params = j.at("params").get<std::vector<double>>();
  if (params.size() != net.params_.size()) throw Error(ErrorCode::Parse, "MLP parameter count mismatch");
  net.params_ = std::move(params);
  return net;
}

Adam::Adam(std::size_t n, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  ++t_;
  beta1_pow_ *= beta1_;
  beta2_pow_ *= beta2_;
  const double c1 = 1.0 - beta1_pow_, c2 = 1.0 - beta2_pow_;
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

MlpRegressor::MlpRegressor(MlpNet net, double y_mean, double y_scale, int epochs)
    : net_(std::move(net)), y_mean_(y_mean), y_scale_(y_scale), epochs_(epochs) {}

double MlpRegressor::predict_row(std::span<const double> x) const {
  return net_.forward(x) * y_scale_ + y_mean_;
}

nlohmann::json MlpRegressor::to_json() const {
  return {{"kind", "mlp"}, {"net", net_.to_json()}, {"y_mean", y_mean_}, {"y_scale", y_scale_},
          {"epochs", epochs_}};
}

std::shared_ptr<const Regressor> MlpRegressor::from_json(const nlohmann::json& j) {
  return std::make_shared<MlpRegressor>(MlpNet::from_json(j.at("net")), j.at("y_mean").get<double>(),
                                        j.at("y_scale").get<double>(), j.at("epochs").get<int>());
}

std::shared_ptr<const MlpRegressor> fit_mlp(const Matrix& x, std::span<const double> y,
                                            const MlpParams& p) {
  const std::size_t n = x.rows();
  if (n == 0 || y.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "MLP needs matching non-empty rows and targets");
  }
  if (!(p.alpha >= 0)) throw Error(ErrorCode::InvalidArgument, "alpha must be >= 0");
  if (!(p.learning_rate > 0)) throw Error(ErrorCode::InvalidArgument, "learning_rate_init must be > 0");
  if (p.batch_size < 1 || p.max_epochs < 1) {
    throw Error(ErrorCode::InvalidArgument, "batch_size and max_iter must be >= 1");
  }

  const auto ys = fit_scale(y);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = (y[i] - ys.mean) / ys.scale;

  MlpNet net(x.cols(), p.hidden, p.activation);
  net.initialize(derive_seed(p.seed, 0));
  Adam adam(net.n_params(), p.learning_rate, p.beta1, p.beta2, p.adam_epsilon);
  Rng rng(derive_seed(p.seed, 1));

  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(p.batch_size), n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(net.n_params());

  double best = std::numeric_limits<double>::infinity();
  int stale = 0, epoch = 0;
  while (epoch < p.max_epochs) {
    ++epoch;
    shuffle(std::span(order), rng);
    double epoch_loss = 0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      const std::span<const std::size_t> rows(order.data() + start, len);
      const double loss = net.loss_and_gradient(x, z, rows, p.alpha, grad);
      adam.step(net.params(), grad);
      epoch_loss += loss * static_cast<double>(len);
    }
    epoch_loss /= static_cast<double>(n);
    if (!std::isfinite(epoch_loss)) {
      throw Error(ErrorCode::Numerical, "MLP training loss diverged at epoch " + std::to_string(epoch));
    }
    if (epoch_loss > best - p.tolerance) {
      ++stale;
    } else {
      stale = 0;
    }
    best = std::min(best, epoch_loss);
    if (stale > p.patience) break;
  }
  // A constant target has nothing to learn; zero output scale returns it exactly.
  const bool constant = std::ranges::all_of(y, [&](double v) { return v == y[0]; });
  return std::make_shared<MlpRegressor>(std::move(net), constant ? y[0] : ys.mean,
                                        constant ? 0.0 : ys.scale, epoch);
}

}  // namespace cbrkit::neural

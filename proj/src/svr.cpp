/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <algorithm>
#include <cmath>
#include <limits>

#include "cbrkit/kernel.hpp"

namespace cbrkit::kernel {

double rbf(std::span<const double> u, std::span<const double> v, double gamma) {
  double d2 = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

double scale_gamma(const Matrix& x) {
  const auto values = x.data();
  const double d = static_cast<double>(x.cols());
  if (values.empty()) return 1.0 / d;
  double mean = 0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return var > 0 ? 1.0 / (d * var) : 1.0 / d;
}

namespace {

constexpr double kTau = 1e-12;

void check_svr_params(const SvrParams& p) {
  if (!(p.c > 0)) throw Error(ErrorCode::InvalidArgument, "SVR C must be > 0");
  if (!(p.epsilon >= 0)) throw Error(ErrorCode::InvalidArgument, "SVR epsilon must be >= 0");
  if (!(p.tolerance > 0)) throw Error(ErrorCode::InvalidArgument, "SVR tolerance must be > 0");
}

std::vector<double> kernel_matrix(const Matrix& x, double gamma) {
  const std::size_t n = x.rows();
  std::vector<double> k(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    k[a * n + a] = 1.0;
    for (std::size_t b = a + 1; b < n; ++b) {
      const double v = rbf(x.row(a), x.row(b), gamma);
      k[a * n + b] = v;
      k[b * n + a] = v;
    }
  }
  return k;
}

}  // namespace

SvrSolution solve_svr(const Matrix& x, std::span<const double> z, const SvrParams& params) {
  check_svr_params(params);
  const std::size_t n = x.rows();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "cannot fit SVR on an empty dataset");
  if (z.size() != n) throw Error(ErrorCode::InvalidArgument, "SVR targets do not match rows");

  SvrSolution sol;
  sol.gamma = params.gamma > 0 ? params.gamma : scale_gamma(x);
  const auto kmat = kernel_matrix(x, sol.gamma);
  auto kern = [&](std::size_t a, std::size_t b) { return kmat[a * n + b]; };

  // Variables 0..n-1 are alpha (sign +1), n..2n-1 are alpha* (sign -1).
  const std::size_t l = 2 * n;
  const double c = params.c;
  std::vector<double> alpha(l, 0.0), grad(l);
  std::vector<int> sign(l);
  for (std::size_t t = 0; t < n; ++t) {
    sign[t] = 1;
    sign[t + n] = -1;
    grad[t] = params.epsilon - z[t];
    grad[t + n] = params.epsilon + z[t];
  }
  auto row_of = [n](std::size_t t) { return t < n ? t : t - n; };
  auto in_up = [&](std::size_t t) { return sign[t] > 0 ? alpha[t] < c : alpha[t] > 0; };
  auto in_low = [&](std::size_t t) { return sign[t] > 0 ? alpha[t] > 0 : alpha[t] < c; };

  // Ill-conditioned kernels (large C, few features) can need many small steps.
  const long max_iter = params.max_passes > 0 ? params.max_passes * static_cast<long>(n)
                                              : std::max(10'000'000L, 100 * static_cast<long>(l));
  constexpr double kInf = std::numeric_limits<double>::infinity();

  for (; sol.iterations < max_iter; ++sol.iterations) {
    // i: maximal violator in the "up" set.
    double gmax = -kInf;
    std::size_t i = l;
    for (std::size_t t = 0; t < l; ++t) {
      if (in_up(t) && -sign[t] * grad[t] >= gmax) {
        gmax = -sign[t] * grad[t];
        i = t;
      }
    }
    // j: second-order choice in the "low" set.
    double gmax2 = -kInf, best_obj = kInf;
    std::size_t j = l;
    for (std::size_t t = 0; t < l; ++t) {
      if (!in_low(t)) continue;
      const double v = sign[t] * grad[t];
      gmax2 = std::max(gmax2, v);
      if (i == l) continue;
      const double diff = gmax + v;
      if (diff > 0) {
        const std::size_t a = row_of(i), b = row_of(t);
        double quad = kern(a, a) + kern(b, b) - 2.0 * kern(a, b);
        if (quad <= 0) quad = kTau;
        const double obj = -diff * diff / quad;
        if (obj <= best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (gmax + gmax2 < params.tolerance || i == l || j == l) {
      sol.converged = true;
      break;
    }

    const std::size_t a = row_of(i), b = row_of(j);
    const double q_ij = sign[i] * sign[j] * kern(a, b);
    const double old_i = alpha[i], old_j = alpha[j];
    if (sign[i] != sign[j]) {
      double quad = kern(a, a) + kern(b, b) + 2.0 * q_ij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > 0) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
      } else {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = c + diff; }
      }
    } else {
      double quad = kern(a, a) + kern(b, b) - 2.0 * q_ij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
      }
      if (sum > c) {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }

    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < l; ++t) {
      const std::size_t r = row_of(t);
      grad[t] += sign[t] * (sign[i] * kern(r, a) * di + sign[j] * kern(r, b) * dj);
    }
  }

  // Offset: average over free variables, else the midpoint of the bounds.
  double ub = kInf, lb = -kInf, free_sum = 0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < l; ++t) {
    const double yg = sign[t] * grad[t];
    if (alpha[t] >= c) {
      if (sign[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (sign[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  const double rho = n_free > 0 ? free_sum / static_cast<double>(n_free) : 0.5 * (ub + lb);
  sol.bias = -rho;
  sol.beta.resize(n);
  for (std::size_t t = 0; t < n; ++t) sol.beta[t] = alpha[t] - alpha[t + n];
  return sol;
}

double svr_kkt_violation(const Matrix& x, std::span<const double> z, const SvrSolution& sol,
                         double c, double epsilon) {
  const std::size_t n = x.rows();
  double worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = sol.bias;
    for (std::size_t j = 0; j < n; ++j) {
      if (sol.beta[j] != 0) f += sol.beta[j] * rbf(x.row(j), x.row(i), sol.gamma);
    }
    const double r = z[i] - f;
    const double b = sol.beta[i];
    double v;
    if (b == 0) {
      v = std::max(0.0, std::abs(r) - epsilon);
    } else if (b >= c) {
      v = std::max(0.0, epsilon - r);
    } else if (b <= -c) {
      v = std::max(0.0, r + epsilon);
    } else if (b > 0) {
      v = std::abs(r - epsilon);
    } else {
      v = std::abs(r + epsilon);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

double svr_dual_objective(const Matrix& x, std::span<const double> z,
                          std::span<const double> beta, double gamma, double epsilon) {
  const std::size_t n = x.rows();
  double linear = 0, quad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    linear += z[i] * beta[i] - epsilon * std::abs(beta[i]);
    if (beta[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (beta[j] != 0) quad += beta[i] * beta[j] * rbf(x.row(i), x.row(j), gamma);
    }
  }
  return linear - 0.5 * quad;
}

SvrRegressor::SvrRegressor(Matrix support, std::vector<double> coef, double bias, double gamma,
                           double y_mean, double y_scale)
    : support_(std::move(support)), coef_(std::move(coef)), bias_(bias), gamma_(gamma),
      y_mean_(y_mean), y_scale_(y_scale) {
  if (coef_.size() != support_.rows()) {
    throw Error(ErrorCode::InvalidArgument, "SVR needs one coefficient per support row");
  }
}

double SvrRegressor::predict_row(std::span<const double> x) const {
  double f = bias_;
  for (std::size_t i = 0; i < coef_.size(); ++i) f += coef_[i] * rbf(support_.row(i), x, gamma_);
  return f * y_scale_ + y_mean_;
}

nlohmann::json SvrRegressor::to_json() const {
  return {{"kind", "svr"},
          {"n_features", support_.cols()},
          {"support", std::vector<double>(support_.data().begin(), support_.data().end())},
          {"coef", coef_},
          {"bias", bias_},
          {"gamma", gamma_},
          {"y_mean", y_mean_},
          {"y_scale", y_scale_}};
}

std::shared_ptr<const Regressor> SvrRegressor::from_json(const nlohmann::json& j) {
  auto coef = j.at("coef").get<std::vector<double>>();
  const auto d = j.at("n_features").get<std::size_t>();
  Matrix support(coef.size(), d, j.at("support").get<std::vector<double>>());
  return std::make_shared<SvrRegressor>(std::move(support), std::move(coef), j.at("bias").get<double>(),
                                        j.at("gamma").get<double>(), j.at("y_mean").get<double>(),
                                        j.at("y_scale").get<double>());
}

std::shared_ptr<const SvrRegressor> fit_svr(const Matrix& x, std::span<const double> y,
                                            const SvrParams& params) {
  if (y.size() != x.rows() || y.empty()) {
    throw Error(ErrorCode::InvalidArgument, "SVR needs matching non-empty rows and targets");
  }
  const auto ys = fit_scale(y);
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = (y[i] - ys.mean) / ys.scale;
  const auto sol = solve_svr(x, z, params);

  std::vector<std::size_t> support_rows;
  std::vector<double> coef;
  for (std::size_t i = 0; i < sol.beta.size(); ++i) {
    if (sol.beta[i] != 0) {
      support_rows.push_back(i);
      coef.push_back(sol.beta[i]);
    }
  }
  return std::make_shared<SvrRegressor>(x.select_rows(support_rows), std::move(coef), sol.bias,
                                        sol.gamma, ys.mean, ys.scale);
}

}  // namespace cbrkit::kernel

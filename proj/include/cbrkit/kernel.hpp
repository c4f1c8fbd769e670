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

namespace cbrkit::kernel {

// ---------------------------------------------------------------------------
// epsilon-SVR, RBF kernel
// ---------------------------------------------------------------------------

struct SvrParams {
  double c = 1.0;
  double epsilon = 0.1;  // in standardized-target units
  /// RBF bandwidth; <= 0 selects 1 / (d * Var(X)).
  double gamma = 0.0;
  double tolerance = 1e-3;
  /// A pass is n pair updates; <= 0 caps at max(1e7, 200 * n) updates.
  long max_passes = 0;
};

double rbf(std::span<const double> u, std::span<const double> v, double gamma);

/// 1 / (d * variance of all entries), falling back to 1 / d for constant data.
double scale_gamma(const Matrix& x);

struct SvrSolution {
  std::vector<double> beta;  // alpha - alpha*, one per training row, in [-C, C]
  double bias = 0;
  double gamma = 0;
  long iterations = 0;
  bool converged = false;
};

/// Solves the epsilon-SVR dual on (x, z) by maximal-violating-pair SMO with
/// second-order working set selection. Stops when the KKT gap is below
/// params.tolerance or the update budget is exhausted.
SvrSolution solve_svr(const Matrix& x, std::span<const double> z, const SvrParams& params);

/// Largest epsilon-KKT violation of a solution, measured on f(x_i) - z_i.
double svr_kkt_violation(const Matrix& x, std::span<const double> z, const SvrSolution& sol,
                         double c, double epsilon);

/// Dual objective W(beta) = sum z_i beta_i - eps sum |beta_i| - 1/2 beta' K beta.
double svr_dual_objective(const Matrix& x, std::span<const double> z,
                          std::span<const double> beta, double gamma, double epsilon);

/// Prediction is (sum beta_i K(s_i, x) + b) * y_scale + y_mean over the
/// support rows; features are expected already standardized.
class SvrRegressor final : public Regressor {
 public:
  SvrRegressor(Matrix support, std::vector<double> coef, double bias, double gamma, double y_mean,
               double y_scale);

  double predict_row(std::span<const double> x) const override;
  nlohmann::json to_json() const override;
  static std::shared_ptr<const Regressor> from_json(const nlohmann::json& j);

  const Matrix& support() const noexcept { return support_; }
  const std::vector<double>& coef() const noexcept { return coef_; }
  double bias() const noexcept { return bias_; }
  double gamma() const noexcept { return gamma_; }

 private:
  Matrix support_;
  std::vector<double> coef_;
  double bias_;
  double gamma_;
  double y_mean_;
  double y_scale_;
};

/// Standardizes y internally; x is used as given.
std::shared_ptr<const SvrRegressor> fit_svr(const Matrix& x, std::span<const double> y,
                                            const SvrParams& params);

// ---------------------------------------------------------------------------
// k-nearest neighbours
// ---------------------------------------------------------------------------

enum class Metric { Manhattan, Euclidean };
enum class Weights { Uniform, Distance };

struct KnnParams {
  int k = 5;
  Metric metric = Metric::Euclidean;
  Weights weights = Weights::Uniform;
};

double distance(std::span<const double> a, std::span<const double> b, Metric metric);

class KnnRegressor final : public Regressor {
 public:
  KnnRegressor(Matrix x, std::vector<double> y, KnnParams params);

  double predict_row(std::span<const double> x) const override;
  nlohmann::json to_json() const override;
  static std::shared_ptr<const Regressor> from_json(const nlohmann::json& j);

  /// Indices of the k nearest training rows, ordered by (distance, index).
  std::vector<std::size_t> neighbors(std::span<const double> x) const;

 private:
  Matrix x_;
  std::vector<double> y_;
  KnnParams params_;
};

std::shared_ptr<const KnnRegressor> fit_knn(const Matrix& x, std::span<const double> y,
                                            const KnnParams& params);

}  // namespace cbrkit::kernel

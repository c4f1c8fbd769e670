/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "cbrkit/kernel.hpp"
#include "oracles.hpp"

using namespace cbrkit;
using namespace cbrkit::kernel;

namespace {

std::vector<double> standardized(std::vector<double> v) {
  const double m = static_cast<double>(oracle::mean(v));
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  s = std::sqrt(s / static_cast<double>(v.size()));
  for (auto& x : v) x = (x - m) / s;
  return v;
}

// Exhaustive neighbour list ordered by (distance, index).
std::vector<std::size_t> brute_neighbors(const Matrix& x, std::span<const double> q, std::size_t k,
                                         bool manhattan) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double diff = x(i, j) - q[j];
      s += manhattan ? std::fabs(diff) : diff * diff;
    }
    d.emplace_back(manhattan ? s : std::sqrt(s), i);
  }
  std::sort(d.begin(), d.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(d[i].second);
  return out;
}

}  // namespace

TEST_SUITE("kernel") {

TEST_CASE("rbf kernel and bandwidth rule") {
  std::vector<double> a{0, 0}, b{1, 2};
  CHECK(rbf(a, b, 0.5) == doctest::Approx(std::exp(-2.5)));
  CHECK(rbf(a, a, 3.0) == 1.0);
  Matrix x(2, 2, std::vector<double>{0, 2, 4, 6});  // entries mean 3, variance 5
  CHECK(scale_gamma(x) == doctest::Approx(1.0 / 10.0));
  Matrix flat(3, 2, 1.0);
  CHECK(scale_gamma(flat) == doctest::Approx(0.5));
}

TEST_CASE("single training point lands inside the tube") {
  Matrix x(1, 2, std::vector<double>{0.3, -1.2});
  std::vector<double> y{42.0};
  for (double c : {0.1, 1.0, 1000.0}) {
    SvrParams p;
    p.c = c;
    p.epsilon = 0.5;
    auto m = fit_svr(x, y, p);
    const double f = m->predict_row(x.row(0));
    CHECK(f >= 41.5);
    CHECK(f <= 42.5);
  }
}

TEST_CASE("constant target gives zero coefficients") {
  std::mt19937_64 rng(1);
  auto x = oracle::random_matrix(rng, 20, 3);
  std::vector<double> z(20, 0.0);
  SvrParams p;
  p.c = 10;
  p.epsilon = 0.1;
  auto sol = solve_svr(x, z, p);
  for (double b : sol.beta) CHECK(b == 0.0);
  CHECK(std::fabs(sol.bias) <= 0.1);

  std::vector<double> y(20, 7.25);
  auto m = fit_svr(x, y, p);
  CHECK(m->predict_row(x.row(3)) == doctest::Approx(7.25).epsilon(1e-12));
}

TEST_CASE("dual solution is feasible and satisfies the KKT conditions") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 20 + 10 * static_cast<std::size_t>(trial);
    auto x = oracle::random_matrix(rng, n, 4);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(2 * x(i, 0)) + 0.5 * x(i, 1) * x(i, 2) + 0.3 * x(i, 3);
    const auto z = standardized(y);
    SvrParams p;
    p.c = trial % 3 == 0 ? 1000.0 : (trial % 3 == 1 ? 1.0 : 10.0);
    p.epsilon = trial % 2 ? 0.5 : 0.05;
    p.gamma = scale_gamma(x);
    auto sol = solve_svr(x, z, p);
    INFO("trial " << trial << " C " << p.c << " eps " << p.epsilon);
    REQUIRE(sol.converged);
    double sum = 0;
    for (double b : sol.beta) {
      CHECK(b >= -p.c);
      CHECK(b <= p.c);
      sum += b;
    }
    CHECK(std::fabs(sum) <= 1e-6);
    const double kkt = oracle::svr_kkt(x, z, sol.beta, sol.bias, sol.gamma, p.c, p.epsilon);
    CHECK(kkt <= p.tolerance);
    CHECK(svr_kkt_violation(x, z, sol, p.c, p.epsilon) == doctest::Approx(kkt).epsilon(1e-6));
    std::vector<double> zero(n, 0.0);
    CHECK(svr_dual_objective(x, z, sol.beta, sol.gamma, p.epsilon) >=
          svr_dual_objective(x, z, zero, sol.gamma, p.epsilon));
  }
}

TEST_CASE("dual objective by hand") {
  Matrix x(2, 1, std::vector<double>{0, 1});
  std::vector<double> z{1, -1};
  std::vector<double> beta{0.5, -0.5};
  // 1 - 0.2 * 1 - 0.5 * (0.25 + 0.25 - 2 * 0.25 * e^-1)
  const double expected = 1.0 - 0.2 - 0.5 * (0.5 - 0.5 * std::exp(-1.0));
  CHECK(svr_dual_objective(x, z, beta, 1.0, 0.2) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("svr parameter errors") {
  Matrix x(3, 1, std::vector<double>{0, 1, 2});
  std::vector<double> y{0, 1, 2};
  SvrParams p;
  p.c = 0;
  CHECK_THROWS_AS(fit_svr(x, y, p), Error);
  p = {};
  p.epsilon = -0.1;
  CHECK_THROWS_AS(fit_svr(x, y, p), Error);
}

TEST_CASE("knn hand examples") {
  Matrix x(3, 1, std::vector<double>{0, 1, 5});
  std::vector<double> y{3, 9, 100};
  KnnParams p;
  p.k = 1;
  auto one = fit_knn(x, y, p);
  for (std::size_t i = 0; i < 3; ++i) CHECK(one->predict_row(x.row(i)) == y[i]);

  p.k = 2;
  CHECK(fit_knn(x, y, p)->predict_row(std::vector<double>{0.4}) == 6.0);

  Matrix line(3, 1, std::vector<double>{1, 2, 4});
  std::vector<double> t{10, 20, 40};
  p.k = 3;
  p.weights = Weights::Distance;
  CHECK(fit_knn(line, t, p)->predict_row(std::vector<double>{0}) == doctest::Approx(30.0 / 1.75).epsilon(1e-14));

  // Exact hits are averaged without weights.
  Matrix dup(3, 1, std::vector<double>{1, 1, 3});
  std::vector<double> u{2, 6, 50};
  CHECK(fit_knn(dup, u, p)->predict_row(std::vector<double>{1}) == 4.0);
}

TEST_CASE("knn ties at the cut-off go to the lower index") {
  Matrix x(4, 1, std::vector<double>{-1, 1, -1, 1});
  std::vector<double> y{1, 2, 3, 4};
  KnnParams p;
  p.k = 2;
  auto m = fit_knn(x, y, p);
  CHECK(m->neighbors(std::vector<double>{0}) == std::vector<std::size_t>{0, 1});
  p.metric = Metric::Manhattan;
  CHECK(fit_knn(x, y, p)->neighbors(std::vector<double>{-1}) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("knn with k = n predicts the mean") {
  std::mt19937_64 rng(3);
  auto x = oracle::random_matrix(rng, 25, 3);
  auto y = oracle::random_vector(rng, 25, 0, 100);
  KnnParams p;
  p.k = 25;
  auto m = fit_knn(x, y, p);
  auto q = oracle::random_matrix(rng, 20, 3);
  for (std::size_t r = 0; r < q.rows(); ++r) {
    CHECK(m->predict_row(q.row(r)) == doctest::Approx(static_cast<double>(oracle::mean(y))).epsilon(1e-12));
  }
}

TEST_CASE("knn neighbours match an exhaustive sort") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> sizes(5, 200);
  for (int trial = 0; trial < 10; ++trial) {
    const auto n = sizes(rng);
    auto x = oracle::random_matrix(rng, n, 7);
    auto y = oracle::random_vector(rng, n, 0, 50);
    for (auto metric : {Metric::Euclidean, Metric::Manhattan}) {
      for (auto weights : {Weights::Uniform, Weights::Distance}) {
        KnnParams p;
        p.k = static_cast<int>(std::min<std::size_t>(n, 1 + static_cast<std::size_t>(trial)));
        p.metric = metric;
        p.weights = weights;
        auto m = fit_knn(x, y, p);
        auto q = oracle::random_matrix(rng, 10, 7);
        for (std::size_t r = 0; r < q.rows(); ++r) {
          const auto got = m->neighbors(q.row(r));
          CHECK(got == brute_neighbors(x, q.row(r), static_cast<std::size_t>(p.k), metric == Metric::Manhattan));
          double lo = 1e300, hi = -1e300;
          for (auto i : got) {
            lo = std::min(lo, y[i]);
            hi = std::max(hi, y[i]);
          }
          const double v = m->predict_row(q.row(r));
          CHECK(v >= lo - 1e-12);
          CHECK(v <= hi + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("knn parameter errors") {
  Matrix x(3, 1, std::vector<double>{0, 1, 2});
  std::vector<double> y{0, 1, 2};
  KnnParams p;
  p.k = 4;
  CHECK_THROWS_AS(fit_knn(x, y, p), Error);
  p.k = 0;
  CHECK_THROWS_AS(fit_knn(x, y, p), Error);
}

TEST_CASE("kernel models round trip") {
  std::mt19937_64 rng(5);
  auto x = oracle::random_matrix(rng, 30, 3);
  auto y = oracle::random_vector(rng, 30, 0, 10);
  auto svr = fit_svr(x, y, SvrParams{});
  auto svr_back = SvrRegressor::from_json(nlohmann::json::parse(svr->to_json().dump()));
  auto knn = fit_knn(x, y, KnnParams{});
  auto knn_back = KnnRegressor::from_json(nlohmann::json::parse(knn->to_json().dump()));
  for (std::size_t r = 0; r < 30; ++r) {
    CHECK(svr_back->predict_row(x.row(r)) == svr->predict_row(x.row(r)));
    CHECK(knn_back->predict_row(x.row(r)) == knn->predict_row(x.row(r)));
  }
}

}  // TEST_SUITE

/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <random>

#include "doctest.h"

#include "cbrkit/cart.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cbrkit;
using cart::Tree;
using cart::TreeParams;

namespace {

double training_sse(const Tree& t, const Matrix& x, const std::vector<double>& y) {
  double s = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double d = t.predict(x.row(i)) - y[i];
    s += d * d;
  }
  return s;
}

TreeParams stump() {
  TreeParams p;
  p.max_depth = 1;
  return p;
}

}  // namespace

TEST_SUITE("cart") {

TEST_CASE("constant target gives a single leaf") {
  Matrix x(5, 2, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  std::vector<double> y(5, 7.0);
  auto t = cart::fit_tree(x, y, TreeParams{});
  REQUIRE(t.nodes().size() == 1);
  CHECK(t.nodes()[0].value == 7.0);
}

TEST_CASE("four point stump") {
  Matrix x(4, 1, std::vector<double>{0, 1, 2, 3});
  std::vector<double> y{0, 0, 10, 10};
  auto t = cart::fit_tree(x, y, stump());
  REQUIRE(t.nodes().size() == 3);
  const auto& root = t.nodes()[0];
  CHECK(root.feature == 0);
  CHECK(root.threshold > 1);
  CHECK(root.threshold < 2);
  CHECK(t.predict(std::vector<double>{0.5}) == 0.0);
  CHECK(t.predict(std::vector<double>{2.5}) == 10.0);
}

TEST_CASE("min_samples_leaf can forbid every split") {
  Matrix x(4, 1, std::vector<double>{0, 1, 2, 3});
  std::vector<double> y{0, 0, 10, 10};
  TreeParams p;
  p.min_samples_leaf = 3;
  auto t = cart::fit_tree(x, y, p);
  REQUIRE(t.nodes().size() == 1);
  CHECK(t.nodes()[0].value == 5.0);
}

TEST_CASE("equal splits resolve to the lowest feature, then the smallest threshold") {
  // Columns 0 and 1 are identical, so every split on one has a twin.
  Matrix x(6, 2, std::vector<double>{1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6});
  std::vector<double> y{1, 1, 5, 5, 1, 1};  // thresholds 2.5 and 4.5 tie
  auto t = cart::fit_tree(x, y, stump());
  CHECK(t.nodes()[0].feature == 0);
  CHECK(t.nodes()[0].threshold == 2.5);
}

TEST_CASE("depth-one split matches the exhaustive minimizer") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> sizes(2, 40), small(0, 6), leaf(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(sizes(rng));
    // Half the datasets use small integers so exact ties are common.
    const bool integer = trial % 2 == 0;
    Matrix x = integer ? Matrix(n, 3) : oracle::random_matrix(rng, n, 3);
    std::vector<double> y = oracle::random_vector(rng, n, -10, 10);
    if (integer) {
      for (auto& v : x.data()) v = small(rng);
      for (auto& v : y) v = small(rng);
    }
    TreeParams p = stump();
    p.min_samples_leaf = leaf(rng);
    const auto t = cart::fit_tree(x, y, p);
    const auto ref = oracle::brute_force_stump(x, y, static_cast<std::size_t>(p.min_samples_leaf), 1e-9);
    INFO("trial " << trial);
    CHECK(t.nodes()[0].feature == ref.feature);
    if (ref.feature >= 0) {
      CHECK(t.nodes()[0].threshold == ref.threshold);
      CHECK(training_sse(t, x, y) == doctest::Approx(ref.children_sse).epsilon(1e-9));
    }
  }
}

TEST_CASE("fully grown tree interpolates distinct rows") {
  std::mt19937_64 rng(5);
  auto x = oracle::random_matrix(rng, 60, 4);
  auto y = oracle::random_vector(rng, 60, 0, 50);
  auto t = cart::fit_tree(x, y, TreeParams{});
  CHECK(training_sse(t, x, y) == 0.0);
}

TEST_CASE("training error never rises with depth") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = oracle::random_matrix(rng, 80, 3);
    auto y = oracle::random_vector(rng, 80, 0, 10);
    double prev = std::numeric_limits<double>::infinity();
    for (int depth = 1; depth <= 8; ++depth) {
      TreeParams p;
      p.max_depth = depth;
      const double sse = training_sse(cart::fit_tree(x, y, p), x, y);
      CHECK(sse <= prev + 1e-9);
      prev = sse;
    }
  }
}

TEST_CASE("structural limits hold") {
  std::mt19937_64 rng(8);
  auto x = oracle::random_matrix(rng, 120, 5);
  auto y = oracle::random_vector(rng, 120, 0, 10);
  TreeParams p;
  p.max_depth = 4;
  p.min_samples_leaf = 5;
  p.min_samples_split = 12;
  auto t = cart::fit_tree(x, y, p);
  CHECK(t.depth() <= 4);
  for (const auto& n : t.nodes()) {
    if (n.is_leaf()) {
      CHECK(n.count >= 5);
    } else {
      CHECK(n.count >= 12);
      CHECK(t.nodes()[static_cast<std::size_t>(n.left)].count + t.nodes()[static_cast<std::size_t>(n.right)].count == n.count);
    }
  }
}

TEST_CASE("feature restriction and subsampling") {
  std::mt19937_64 rng(9);
  auto x = oracle::random_matrix(rng, 100, 7);
  auto y = x.column(2);
  TreeParams p;
  p.allowed_features = {0, 5};
  auto t = cart::fit_tree(x, y, p);
  for (const auto& n : t.nodes()) {
    if (!n.is_leaf()) CHECK((n.feature == 0 || n.feature == 5));
  }
  TreeParams q;
  q.max_features = cart::sqrt_features(7);
  CHECK(q.max_features == 3);
  q.seed = 77;
  CHECK(cart::fit_tree(x, y, q) == cart::fit_tree(x, y, q));
}

TEST_CASE("random thresholds stay inside the node range") {
  std::mt19937_64 rng(10);
  auto x = oracle::random_matrix(rng, 50, 2);
  auto y = oracle::random_vector(rng, 50, 0, 10);
  TreeParams p;
  p.split_style = cart::SplitStyle::RandomThreshold;
  p.max_depth = 1;
  p.seed = 4;
  auto t = cart::fit_tree(x, y, p);
  REQUIRE(t.nodes().size() == 3);
  const auto col = x.column(static_cast<std::size_t>(t.nodes()[0].feature));
  CHECK(t.nodes()[0].threshold >= *std::min_element(col.begin(), col.end()));
  CHECK(t.nodes()[0].threshold < *std::max_element(col.begin(), col.end()));
  CHECK(cart::fit_tree(x, y, p) == t);
}

TEST_CASE("bootstrap rows with duplicates") {
  Matrix x(3, 1, std::vector<double>{0, 1, 2});
  std::vector<double> y{0, 3, 9};
  std::vector<std::size_t> rows{0, 0, 2, 2};
  auto t = cart::fit_tree(x, y, rows, TreeParams{});
  CHECK(t.nodes()[0].count == 4);
  CHECK(t.predict(std::vector<double>{0}) == 0.0);
  CHECK(t.predict(std::vector<double>{2}) == 9.0);
}

TEST_CASE("invalid parameters") {
  Matrix x(4, 1, std::vector<double>{0, 1, 2, 3});
  std::vector<double> y{0, 1, 2, 3};
  TreeParams p;
  p.min_samples_split = 1;
  CHECK_THROWS_AS(cart::fit_tree(x, y, p), Error);
  p = {};
  p.min_samples_leaf = 0;
  CHECK_THROWS_AS(cart::fit_tree(x, y, p), Error);
  p = {};
  p.max_features = 2;
  CHECK_THROWS_AS(cart::fit_tree(x, y, p), Error);
  p = {};
  p.max_depth = 0;
  CHECK_THROWS_AS(cart::fit_tree(x, y, p), Error);
  CHECK_THROWS_AS(cart::fit_tree(x, y, std::vector<std::size_t>{}, TreeParams{}), Error);
}

TEST_CASE("tree json round trip") {
  std::mt19937_64 rng(12);
  auto x = oracle::random_matrix(rng, 40, 3);
  auto y = oracle::random_vector(rng, 40, 0, 10);
  auto t = cart::fit_tree(x, y, TreeParams{});
  auto back = Tree::from_json(nlohmann::json::parse(t.to_json().dump()));
  CHECK(back == t);
}

}  // TEST_SUITE

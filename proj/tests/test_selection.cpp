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
#include <set>

#include "doctest.h"

#include "cbrkit/data.hpp"
#include "cbrkit/parallel.hpp"
#include "cbrkit/selection.hpp"
#include "oracles.hpp"

using namespace cbrkit;

namespace {

using I = std::int64_t;

void check_partition(const FoldPlan& plan, std::size_t n, std::size_t k) {
  REQUIRE(plan.size() == k);
  std::vector<int> seen(n, 0);
  std::size_t lo = n, hi = 0;
  for (const auto& f : plan) {
    CHECK(std::is_sorted(f.train.begin(), f.train.end()));
    CHECK(std::is_sorted(f.validation.begin(), f.validation.end()));
    CHECK(f.train.size() + f.validation.size() == n);
    lo = std::min(lo, f.validation.size());
    hi = std::max(hi, f.validation.size());
    std::vector<int> mark(n, 0);
    for (auto i : f.validation) {
      REQUIRE(i < n);
      ++seen[i];
      mark[i] = 1;
    }
    for (auto i : f.train) {
      REQUIRE(i < n);
      CHECK(mark[i] == 0);
      mark[i] = 1;
    }
    CHECK(std::ranges::all_of(mark, [](int m) { return m == 1; }));
  }
  CHECK(std::ranges::all_of(seen, [](int s) { return s == 1; }));
  CHECK(hi - lo <= 1);
}

Dataset small_dataset(std::size_t n, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.n_samples = n;
  cfg.seed = seed;
  return generate_synthetic(cfg);
}

std::vector<double> gather(std::span<const double> y, const std::vector<std::size_t>& rows) {
  std::vector<double> out;
  for (auto r : rows) out.push_back(y[r]);
  return out;
}

Metrics oracle_metrics(std::span<const double> y, std::span<const double> yhat) {
  return {oracle::r2(y, yhat), oracle::mae(y, yhat), oracle::rmse(y, yhat)};
}

ReportRow row(Family f, ParamSet params, Metrics tr, Metrics va, Metrics te) {
  return ReportRow{f, std::nullopt, std::move(params), tr, va, te, {}};
}

}  // namespace

TEST_SUITE("selection") {

TEST_CASE("fold plans partition the rows") {
  check_partition(make_folds(10, 5, 0), 10, 5);
  const auto plan = make_folds(305, 5, 3);
  check_partition(plan, 305, 5);
  for (const auto& f : plan) CHECK(f.validation.size() == 61);
  const auto uneven = make_folds(13, 5, 1);
  std::vector<std::size_t> sizes;
  for (const auto& f : uneven) sizes.push_back(f.validation.size());
  CHECK(sizes == std::vector<std::size_t>{3, 3, 3, 2, 2});
  CHECK(make_folds(305, 5, 3)[2].validation == plan[2].validation);
  CHECK(make_folds(305, 5, 4)[0].validation != plan[0].validation);
  CHECK_THROWS_AS(make_folds(4, 5, 0), Error);
  CHECK_THROWS_AS(make_folds(10, 1, 0), Error);
}

TEST_CASE("fold partition property over random triples") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> ns(2, 400);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = ns(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, std::min<std::size_t>(n, 12))(rng);
    check_partition(make_folds(n, k, rng()), n, k);
  }
}

TEST_CASE("grid expansion") {
  ParamGrid grid{{"b", {std::string("x"), std::string("y")}}, {"a", {I{1}, I{2}}}};
  const auto c = expand_grid(grid);
  REQUIRE(c.size() == 4);
  CHECK(grid_size(grid) == 4);
  CHECK(format_params(c[0]) == "{'a': 1, 'b': 'x'}");
  CHECK(format_params(c[1]) == "{'a': 1, 'b': 'y'}");
  CHECK(format_params(c[3]) == "{'a': 2, 'b': 'y'}");
  CHECK(expand_grid({}).size() == 1);
  CHECK_THROWS_AS(expand_grid({{"a", {}}}), Error);
}

TEST_CASE("reference parameters and default grids") {
  const std::map<Family, std::string> reference{
      {Family::RandomForest,
       "{'max_depth': 10, 'max_features': 'sqrt', 'min_samples_leaf': 1, 'min_samples_split': 5, 'n_estimators': 100}"},
      {Family::Bagging, "{'max_features': 0.7, 'max_samples': 0.9, 'n_estimators': 200}"},
      {Family::ExtraTrees, "{'max_depth': 10, 'min_samples_split': 2, 'n_estimators': 300}"},
      {Family::XGBoost,
       "{'colsample_bytree': 0.7, 'gamma': 0.1, 'learning_rate': 0.01, 'max_depth': 3, 'n_estimators': 300, 'subsample': 0.7}"},
      {Family::SVR, "{'C': 1000, 'epsilon': 0.5, 'kernel': 'rbf'}"},
      {Family::AdaBoost, "{'learning_rate': 0.01, 'loss': 'exponential', 'n_estimators': 200}"},
      {Family::KNeighbors, "{'metric': 'manhattan', 'n_neighbors': 3, 'weights': 'distance'}"},
      {Family::MLPRegressor,
       "{'activation': 'relu', 'alpha': 0.001, 'hidden_layer_sizes': (100,), 'learning_rate': 'constant', 'solver': 'adam'}"},
      {Family::GradientBoosting, "{'learning_rate': 0.2, 'max_depth': 5, 'n_estimators': 300, 'subsample': 0.7}"},
      {Family::DecisionTree, "{'max_depth': 5, 'min_samples_leaf': 2, 'min_samples_split': 10}"},
  };
  for (auto family : all_families()) {
    INFO(family_name(family));
    const auto anchor = anchor_params(family);
    const auto grid = default_grid(family);
    if (family == Family::Voting || family == Family::Stacking) {
      CHECK(anchor.empty());
      CHECK(grid.empty());
      continue;
    }
    CHECK(format_params(anchor) == reference.at(family));
    CHECK(grid_size(grid) <= 72);
    const auto candidates = expand_grid(grid);
    // The reference setting is one of the candidates.
    CHECK(std::ranges::count(candidates, anchor) == 1);
  }
}

TEST_CASE("mean predictor scores no better than zero") {
  auto data = small_dataset(60, 2);
  const auto plan = make_folds(60, 5, 1);
  // No split can satisfy the leaf size, so every fold predicts its training mean.
  ParamSet params{{"min_samples_leaf", I{40}}};
  auto res = cross_validate(Family::DecisionTree, params, data.features(), data.targets(), plan, 0);
  CHECK(res.train.r2 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(res.validation.r2 <= 0.0);
  CHECK(res.validation.r2 > -0.5);
}

TEST_CASE("one-neighbour recall is perfect on fold-train rows") {
  auto data = small_dataset(50, 3);
  const auto plan = make_folds(50, 5, 2);
  auto res = cross_validate(Family::KNeighbors, {{"n_neighbors", I{1}}}, data.features(), data.targets(), plan, 0);
  for (const auto& m : res.fold_train) {
    CHECK(m.r2 == 1.0);
    CHECK(m.mae == 0.0);
  }
}

TEST_CASE("two-fold stump evaluation by hand") {
  Matrix x(10, 2, std::vector<double>{1, 5, 2, 3, 3, 8, 4, 1, 5, 9, 6, 2, 7, 7, 8, 4, 9, 6, 10, 0});
  std::vector<double> y{2, 3, 1, 8, 9, 4, 12, 11, 15, 13};
  const auto plan = make_folds(10, 2, 7);
  auto res = cross_validate(Family::DecisionTree, {{"max_depth", I{1}}}, x, y, plan, 0);
  Metrics tr_sum, va_sum;
  for (std::size_t f = 0; f < 2; ++f) {
    const auto& fold = plan[f];
    const Matrix xt = x.select_rows(fold.train);
    const auto yt = gather(y, fold.train);
    const auto stump = oracle::brute_force_stump(xt, yt, 1, 1e-12);
    auto predict = [&](std::span<const double> row) {
      double l = 0, r = 0;
      int nl = 0, nr = 0;
      for (std::size_t i = 0; i < xt.rows(); ++i) {
        if (stump.feature < 0 || xt(i, static_cast<std::size_t>(stump.feature)) <= stump.threshold) {
          l += yt[i];
          ++nl;
        } else {
          r += yt[i];
          ++nr;
        }
      }
      const bool left = stump.feature < 0 || row[static_cast<std::size_t>(stump.feature)] <= stump.threshold;
      return left ? l / nl : r / nr;
    };
    std::vector<double> pt, pv;
    for (auto i : fold.train) pt.push_back(predict(x.row(i)));
    for (auto i : fold.validation) pv.push_back(predict(x.row(i)));
    const auto mt = oracle_metrics(yt, pt);
    const auto mv = oracle_metrics(gather(y, fold.validation), pv);
    CHECK(res.fold_train[f].r2 == doctest::Approx(mt.r2).epsilon(1e-12));
    CHECK(res.fold_validation[f].rmse == doctest::Approx(mv.rmse).epsilon(1e-12));
    tr_sum.r2 += mt.r2;
    tr_sum.mae += mt.mae;
    va_sum.r2 += mv.r2;
    va_sum.mae += mv.mae;
    va_sum.rmse += mv.rmse;
  }
  CHECK(res.train.r2 == doctest::Approx(tr_sum.r2 / 2).epsilon(1e-12));
  CHECK(res.train.mae == doctest::Approx(tr_sum.mae / 2).epsilon(1e-12));
  CHECK(res.validation.r2 == doctest::Approx(va_sum.r2 / 2).epsilon(1e-12));
  CHECK(res.validation.mae == doctest::Approx(va_sum.mae / 2).epsilon(1e-12));
  CHECK(res.validation.rmse == doctest::Approx(va_sum.rmse / 2).epsilon(1e-12));
}

TEST_CASE("scalers see only their fold's training rows") {
  auto data = small_dataset(70, 4);
  const auto& x = data.features();
  const auto plan = make_folds(70, 5, 9);
  for (auto family : {Family::SVR, Family::KNeighbors, Family::MLPRegressor}) {
    INFO(family_name(family));
    ParamSet params;
    if (family == Family::MLPRegressor) params["max_iter"] = I{5};
    auto res = cross_validate(family, params, x, data.targets(), plan, 0, true);
    REQUIRE(res.models.size() == 5);
    for (std::size_t f = 0; f < 5; ++f) {
      const auto& scaler = res.models[f].scaler();
      REQUIRE(scaler.has_value());
      for (std::size_t c = 0; c < x.cols(); ++c) {
        long double m = 0, v = 0;
        for (auto r : plan[f].train) m += x(r, c);
        m /= static_cast<long double>(plan[f].train.size());
        for (auto r : plan[f].train) v += (x(r, c) - m) * (x(r, c) - m);
        v /= static_cast<long double>(plan[f].train.size());
        CHECK(scaler->mean()[c] == doctest::Approx(static_cast<double>(m)).epsilon(1e-12));
        CHECK(scaler->scale()[c] == doctest::Approx(static_cast<double>(std::sqrt(v))).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("fit errors name the fold") {
  auto data = small_dataset(20, 5);
  const auto plan = make_folds(20, 4, 0);
  try {
    cross_validate(Family::KNeighbors, {{"n_neighbors", I{18}}}, data.features(), data.targets(), plan, 0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("fold 1: ", 0) == 0);
  }
}

TEST_CASE("grid search bookkeeping") {
  auto data = small_dataset(60, 6);
  const auto plan = make_folds(60, 3, 0);
  auto single = grid_search(Family::DecisionTree, {{"max_depth", {I{2}}}}, data.features(), data.targets(), plan, 0);
  CHECK(single.candidates.size() == 1);
  CHECK(single.best_index == 0);
  CHECK(format_params(single.best_params) == "{'max_depth': 2}");

  ParamGrid grid{{"max_depth", {I{1}, I{3}}}, {"min_samples_leaf", {I{1}, I{5}}}};
  auto four = grid_search(Family::DecisionTree, grid, data.features(), data.targets(), plan, 0);
  REQUIRE(four.candidates.size() == 4);
  for (std::size_t c = 0; c < 4; ++c) {
    auto cv = cross_validate(Family::DecisionTree, four.candidates[c].params, data.features(), data.targets(), plan, 0);
    CHECK(cv.validation.r2 == four.candidates[c].validation.r2);
    CHECK(cv.train.rmse == four.candidates[c].train.rmse);
    CHECK(four.candidates[four.best_index].validation.r2 >= cv.validation.r2);
  }

  // Identical candidates: the earliest one is kept.
  auto dup = grid_search(Family::DecisionTree, {{"max_depth", {I{3}, I{3}}}}, data.features(), data.targets(), plan, 0);
  CHECK(dup.best_index == 0);
}

TEST_CASE("the generating model wins on noiseless data") {
  std::mt19937_64 rng(22);
  Matrix x(40, 3);
  std::vector<double> y(40);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t i = 0; i < 40; ++i) {
    x(i, 0) = i % 2 ? 1.0 : -1.0;
    x(i, 1) = g(rng);
    x(i, 2) = g(rng);
    y[i] = x(i, 0) > 0 ? 10.0 : 2.0;
  }
  const auto plan = make_folds(40, 5, 1);
  // The mean predictor first, the generating stump second.
  auto res = grid_search(Family::DecisionTree, {{"max_depth", {I{1}}}, {"min_samples_leaf", {I{30}, I{1}}}}, x, y, plan, 0);
  CHECK(res.best_index == 1);
  CHECK(res.candidates[1].validation.r2 == 1.0);
}

TEST_CASE("grid search is independent of the thread count") {
  auto data = small_dataset(80, 7);
  const auto plan = make_folds(80, 4, 2);
  ParamGrid grid{{"n_estimators", {I{5}, I{9}}}, {"max_depth", {I{2}, I{4}}}};
  set_thread_count(1);
  auto a = grid_search(Family::RandomForest, grid, data.features(), data.targets(), plan, 3);
  set_thread_count(4);
  auto b = grid_search(Family::RandomForest, grid, data.features(), data.targets(), plan, 3);
  set_thread_count(0);
  REQUIRE(a.candidates.size() == b.candidates.size());
  for (std::size_t c = 0; c < a.candidates.size(); ++c) {
    CHECK(a.candidates[c].validation.r2 == b.candidates[c].validation.r2);
    CHECK(a.candidates[c].train.mae == b.candidates[c].train.mae);
  }
  CHECK(a.best_index == b.best_index);
}

TEST_CASE("one seed and one family matches a manual run") {
  auto data = small_dataset(120, 8);
  BenchmarkOptions opt;
  opt.families = {Family::DecisionTree};
  ParamGrid grid{{"max_depth", {I{2}, I{4}, std::monostate{}}}};
  opt.grids[Family::DecisionTree] = grid;
  opt.n_seeds = 1;
  opt.seed_base = 0;
  opt.cv_folds = 4;
  auto result = run_benchmark(data, opt);
  REQUIRE(result.report.rows.size() == 1);
  const auto& row = result.report.rows[0];

  SplitSpec spec;
  spec.seed = 0;
  auto [train, test] = split(data, spec);
  const auto plan = make_folds(train.size(), 4, 0);
  auto gr = grid_search(Family::DecisionTree, grid, train.features(), train.targets(), plan, 0);
  auto model = fit_model(Family::DecisionTree, gr.best_params, train, 0);
  const auto test_metrics = oracle_metrics(test.targets(), model.predict(test));

  CHECK(row.best_params == gr.best_params);
  CHECK(row.train.r2 == gr.candidates[gr.best_index].train.r2);
  CHECK(row.validation.rmse == gr.candidates[gr.best_index].validation.rmse);
  CHECK(row.test.r2 == doctest::Approx(test_metrics.r2).epsilon(1e-12));
  CHECK(row.test.mae == doctest::Approx(test_metrics.mae).epsilon(1e-12));
  CHECK(result.first_seed_train.size() == train.size());
  CHECK(result.first_seed_models.at(Family::DecisionTree).serialize() == model.serialize());
}

TEST_CASE("report cells average the seeds and rows are ranked") {
  auto data = small_dataset(100, 9);
  BenchmarkOptions opt;
  opt.families = {Family::DecisionTree, Family::KNeighbors, Family::SVR};
  opt.grids[Family::DecisionTree] = {{"max_depth", {I{1}, I{3}}}};
  opt.grids[Family::KNeighbors] = {{"n_neighbors", {I{3}, I{7}}}};
  opt.grids[Family::SVR] = {{"C", {I{10}}}};
  opt.n_seeds = 3;
  opt.seed_base = 5;
  opt.cv_folds = 3;
  auto result = run_benchmark(data, opt);
  const auto& rows = result.report.rows;
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) CHECK(rows[i].test.r2 >= rows[i + 1].test.r2);
  for (const auto& r : rows) {
    REQUIRE(r.runs.size() == 3);
    CHECK(r.runs[0].seed == 5);
    CHECK(r.runs[2].seed == 7);
    Metrics sum;
    for (const auto& run : r.runs) {
      sum.r2 += run.test.r2;
      sum.mae += run.validation.mae;
      sum.rmse += run.train.rmse;
    }
    CHECK(std::fabs(r.test.r2 - sum.r2 / 3) <= 1e-12);
    CHECK(std::fabs(r.validation.mae - sum.mae / 3) <= 1e-12);
    CHECK(std::fabs(r.train.rmse - sum.rmse / 3) <= 1e-12);
    // The reported setting was chosen at least as often as any other.
    const auto chosen = std::ranges::count_if(r.runs, [&](const SeedRun& s) { return s.best_params == r.best_params; });
    for (const auto& run : r.runs) {
      CHECK(std::ranges::count_if(r.runs, [&](const SeedRun& s) { return s.best_params == run.best_params; }) <= chosen);
    }
  }
  CHECK(report_csv(run_benchmark(data, opt).report) == report_csv(result.report));
}

TEST_CASE("failing family is reported last with its reason") {
  auto data = small_dataset(60, 10);
  BenchmarkOptions opt;
  opt.families = {Family::KNeighbors, Family::DecisionTree};
  opt.grids[Family::KNeighbors] = {{"n_neighbors", {I{100}}}};
  opt.grids[Family::DecisionTree] = {{"max_depth", {I{2}}}};
  opt.n_seeds = 2;
  auto result = run_benchmark(data, opt);
  REQUIRE(result.report.rows.size() == 2);
  CHECK(result.report.rows[0].family == Family::DecisionTree);
  const auto& failed = result.report.rows[1];
  REQUIRE(failed.failure.has_value());
  CHECK(failed.failure->rfind("seed 0: fold 1: ", 0) == 0);
  CHECK(result.first_seed_models.count(Family::KNeighbors) == 0);
  const auto csv = report_csv(result.report);
  CHECK(csv.find("KNeighbors,failed: seed 0: fold 1: n_neighbors (100) exceeds the training size") != std::string::npos);
  CHECK(csv.find(",nan,nan,nan,nan,nan,nan,nan,nan,nan\n") != std::string::npos);
}

TEST_CASE("report serializations") {
  EvalReport report;
  report.rows.push_back(row(Family::RandomForest, {{"max_depth", I{10}}, {"max_features", std::string("sqrt")}},
                            {0.9474, 3.957, 9.0341}, {0.76, 8.5164, 19.4772}, {0.8321, 6.2634, 11.8236}));
  report.rows.push_back(row(Family::Voting, {}, {0.99, 1.99, 3.3}, {-0.00004, 8.6, 21.5}, {0.8, 6.0, 11.6}));
  CHECK(report_csv(report) ==
        "family,best_params,train_r2,train_mae,train_rmse,val_r2,val_mae,val_rmse,test_r2,test_mae,test_rmse\n"
        "RandomForest,\"{'max_depth': 10, 'max_features': 'sqrt'}\",0.947400,3.957000,9.034100,0.760000,8.516400,"
        "19.477200,0.832100,6.263400,11.823600\n"
        "Voting,N/A (No tuning parameters),0.990000,1.990000,3.300000,-0.000040,8.600000,21.500000,0.800000,6.000000,11.600000\n");
  const auto text = report_text(report);
  CHECK(text ==
        "family        best_params                                train_r2  train_mae  train_rmse  val_r2  val_mae  val_rmse  test_r2  test_mae  test_rmse\n"
        "RandomForest  {'max_depth': 10, 'max_features': 'sqrt'}     0.947      3.957       9.034   0.760    8.516    19.477    0.832     6.263     11.824\n"
        "Voting        N/A (No tuning parameters)                    0.990      1.990       3.300   0.000    8.600    21.500    0.800     6.000     11.600\n");
}

}  // TEST_SUITE

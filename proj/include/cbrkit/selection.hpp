/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbrkit/data.hpp"
#include "cbrkit/metrics.hpp"
#include "cbrkit/model.hpp"

namespace cbrkit {

struct Fold {
  std::vector<std::size_t> train;       // ascending
  std::vector<std::size_t> validation;  // ascending
};
using FoldPlan = std::vector<Fold>;

/// Shuffles 0..n-1 with `seed` and cuts it into k validation blocks whose
/// sizes differ by at most one (the first n % k blocks are larger).
FoldPlan make_folds(std::size_t n, std::size_t k, std::uint64_t seed);

/// Hyperparameter name -> candidate values.
using ParamGrid = std::map<std::string, std::vector<ParamValue>>;

/// Cartesian product in enumeration order: keys ascending, the last key
/// varying fastest.
std::vector<ParamSet> expand_grid(const ParamGrid& grid);
std::size_t grid_size(const ParamGrid& grid);

/// Default search grid for a family; contains every anchor value.
ParamGrid default_grid(Family family);

struct CvResult {
  Metrics train;       // mean over folds of fold-train metrics
  Metrics validation;  // mean over folds of fold-validation metrics
  std::vector<Metrics> fold_train;
  std::vector<Metrics> fold_validation;
  std::vector<FittedModel> models;  // filled only when requested
};

/// Fits on each fold's training rows and scores both parts. Models are seeded
/// with `seed` in every fold.
CvResult cross_validate(Family family, const ParamSet& params, const Matrix& x,
                        std::span<const double> y, const FoldPlan& plan, std::uint64_t seed,
                        bool keep_models = false);

struct CandidateResult {
  ParamSet params;
  Metrics train;
  Metrics validation;
};

struct GridResult {
  std::size_t best_index = 0;
  ParamSet best_params;
  std::vector<CandidateResult> candidates;  // enumeration order
};

/// Exhaustive search; best = highest mean validation R^2, then lowest mean
/// validation RMSE, then earliest candidate. Candidate x fold fits run on the
/// worker pool.
GridResult grid_search(Family family, const ParamGrid& grid, const Matrix& x,
                       std::span<const double> y, const FoldPlan& plan, std::uint64_t seed);

struct BenchmarkOptions {
  std::vector<Family> families;
  std::map<Family, ParamGrid> grids;  // families missing here use default_grid
  std::size_t n_seeds = 5;
  std::uint64_t seed_base = 0;  // seeds are seed_base, seed_base + 1, ...
  std::size_t cv_folds = 5;
  SplitSpec split;
};

struct SeedRun {
  std::uint64_t seed = 0;
  ParamSet best_params;
  Metrics train;
  Metrics validation;
  Metrics test;
};

struct ReportRow {
  Family family;
  std::optional<std::string> failure;  // set when some seed failed
  ParamSet best_params;                // most frequently selected set
  Metrics train;
  Metrics validation;
  Metrics test;
  std::vector<SeedRun> runs;
};

struct EvalReport {
  std::vector<ReportRow> rows;  // test R^2 descending, failed rows last
};

struct BenchmarkResult {
  EvalReport report;
  /// Refit of the selected parameters on the first seed's training part.
  std::map<Family, FittedModel> first_seed_models;
  Dataset first_seed_train;
  Dataset first_seed_test;
};

BenchmarkResult run_benchmark(const Dataset& data, const BenchmarkOptions& options);

/// Report serializations. Columns: family, best_params, train_r2, train_mae,
/// train_rmse, val_r2, val_mae, val_rmse, test_r2, test_mae, test_rmse.
std::string report_csv(const EvalReport& report);
std::string report_text(const EvalReport& report);

}  // namespace cbrkit

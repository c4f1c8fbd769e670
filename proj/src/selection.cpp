/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "cbrkit/selection.hpp"

#include <algorithm>

#include "cbrkit/parallel.hpp"

namespace cbrkit {
namespace {

std::vector<double> gather(std::span<const double> y, std::span<const std::size_t> rows) {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = y[rows[i]];
  return out;
}

Metrics mean_of(std::span<const Metrics> items) {
  Metrics m;
  for (const auto& it : items) {
    m.r2 += it.r2;
    m.mae += it.mae;
    m.rmse += it.rmse;
  }
  const double k = static_cast<double>(items.size());
  m.r2 /= k;
  m.mae /= k;
  m.rmse /= k;
  return m;
}

struct FoldOutcome {
  Metrics train;
  Metrics validation;
  std::optional<FittedModel> model;
};

FoldOutcome run_fold(Family family, const ParamSet& params, const Matrix& x,
                     std::span<const double> y, const Fold& fold, std::size_t index,
                     std::uint64_t seed, bool keep) {
  try {
    const auto xt = x.select_rows(fold.train);
    const auto yt = gather(y, fold.train);
    const auto xv = x.select_rows(fold.validation);
    const auto yv = gather(y, fold.validation);
    auto model = fit_model(family, params, xt, yt, seed);
    FoldOutcome out{evaluate(yt, model.predict(xt)), evaluate(yv, model.predict(xv)), std::nullopt};
    if (keep) out.model.emplace(std::move(model));
    return out;
  } catch (const Error& e) {
    throw Error(e.code(), "fold " + std::to_string(index + 1) + ": " + e.what());
  }
}

}  // namespace

CvResult cross_validate(Family family, const ParamSet& params, const Matrix& x,
                        std::span<const double> y, const FoldPlan& plan, std::uint64_t seed,
                        bool keep_models) {
  if (plan.empty()) throw Error(ErrorCode::InvalidArgument, "empty fold plan");
  if (y.size() != x.rows()) throw Error(ErrorCode::InvalidArgument, "feature rows and targets differ in length");
  std::vector<std::optional<FoldOutcome>> outcomes(plan.size());
  parallel_for(plan.size(), [&](std::size_t f) {
    outcomes[f] = run_fold(family, params, x, y, plan[f], f, seed, keep_models);
  });
  CvResult res;
  for (auto& o : outcomes) {
    res.fold_train.push_back(o->train);
    res.fold_validation.push_back(o->validation);
    if (keep_models) res.models.push_back(std::move(*o->model));
  }
  res.train = mean_of(res.fold_train);
  res.validation = mean_of(res.fold_validation);
  return res;
}

GridResult grid_search(Family family, const ParamGrid& grid, const Matrix& x,
                       std::span<const double> y, const FoldPlan& plan, std::uint64_t seed) {
  if (plan.empty()) throw Error(ErrorCode::InvalidArgument, "empty fold plan");
  const auto candidates = expand_grid(grid);
  const std::size_t k = plan.size();
  std::vector<FoldOutcome> cells(candidates.size() * k);
  parallel_for(cells.size(), [&](std::size_t t) {
    cells[t] = run_fold(family, candidates[t / k], x, y, plan[t % k], t % k, seed, false);
  });

  GridResult res;
  std::vector<Metrics> tr(k), va(k);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    for (std::size_t f = 0; f < k; ++f) {
      tr[f] = cells[c * k + f].train;
      va[f] = cells[c * k + f].validation;
    }
    res.candidates.push_back({candidates[c], mean_of(tr), mean_of(va)});
  }
  for (std::size_t c = 1; c < res.candidates.size(); ++c) {
    const auto& cand = res.candidates[c].validation;
    const auto& best = res.candidates[res.best_index].validation;
    if (cand.r2 > best.r2 || (cand.r2 == best.r2 && cand.rmse < best.rmse)) res.best_index = c;
  }
  res.best_params = res.candidates[res.best_index].params;
  return res;
}

BenchmarkResult run_benchmark(const Dataset& data, const BenchmarkOptions& options) {
  if (!data.has_target()) throw Error(ErrorCode::InvalidArgument, "benchmark data has no CBR column");
  if (options.families.empty()) throw Error(ErrorCode::InvalidArgument, "no model families requested");
  if (options.n_seeds == 0) throw Error(ErrorCode::InvalidArgument, "n_seeds must be >= 1");

  const std::size_t nf = options.families.size();
  std::vector<std::vector<SeedRun>> runs(nf);
  std::vector<std::optional<std::string>> failures(nf);
  BenchmarkResult result;

  for (std::size_t s = 0; s < options.n_seeds; ++s) {
    const std::uint64_t seed = options.seed_base + s;
    SplitSpec spec = options.split;
    if (!spec.fixed_split) spec.seed = seed;
    auto [train, test] = split(data, spec);
    const auto plan = make_folds(train.size(), options.cv_folds, seed);

    for (std::size_t fi = 0; fi < nf; ++fi) {
      if (failures[fi]) continue;
      const Family family = options.families[fi];
      try {
        auto it = options.grids.find(family);
        const ParamGrid grid = it != options.grids.end() ? it->second : default_grid(family);
        const auto gr = grid_search(family, grid, train.features(), train.targets(), plan, seed);
        auto model = fit_model(family, gr.best_params, train, seed);
        SeedRun run;
        run.seed = seed;
        run.best_params = gr.best_params;
        run.train = gr.candidates[gr.best_index].train;
        run.validation = gr.candidates[gr.best_index].validation;
        run.test = evaluate(test.targets(), model.predict(test));
        runs[fi].push_back(std::move(run));
        if (s == 0) result.first_seed_models.insert_or_assign(family, std::move(model));
      } catch (const Error& e) {
        failures[fi] = "seed " + std::to_string(seed) + ": " + e.what();
        result.first_seed_models.erase(family);
      }
    }
    if (s == 0) {
      result.first_seed_train = std::move(train);
      result.first_seed_test = std::move(test);
    }
  }

  for (std::size_t fi = 0; fi < nf; ++fi) {
    ReportRow row{options.families[fi], failures[fi], {}, {}, {}, {}, runs[fi]};
    if (!row.failure) {
      std::vector<Metrics> tr, va, te;
      for (const auto& r : runs[fi]) {
        tr.push_back(r.train);
        va.push_back(r.validation);
        te.push_back(r.test);
      }
      row.train = mean_of(tr);
      row.validation = mean_of(va);
      row.test = mean_of(te);
      // Most frequently selected set; earliest seed wins ties.
      std::size_t best_count = 0;
      for (const auto& r : runs[fi]) {
        const auto count = static_cast<std::size_t>(std::ranges::count_if(
            runs[fi], [&](const SeedRun& o) { return o.best_params == r.best_params; }));
        if (count > best_count) {
          best_count = count;
          row.best_params = r.best_params;
        }
      }
    }
    result.report.rows.push_back(std::move(row));
  }
  std::ranges::stable_sort(result.report.rows, [](const ReportRow& a, const ReportRow& b) {
    if (a.failure.has_value() != b.failure.has_value()) return !a.failure.has_value();
    if (a.failure) return false;
    return a.test.r2 > b.test.r2;
  });
  return result;
}

}  // namespace cbrkit

/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <string>
#include <vector>

#include "cbrkit/data.hpp"
#include "cbrkit/model.hpp"
#include "cbrkit/selection.hpp"

namespace cbrkit {

/// Everything a benchmark or generate run needs, resolvable from a JSON file
/// plus JSON overrides (overrides win).
struct RunConfig {
  std::string data_path;  // empty: use the synthetic generator
  GeneratorConfig generator;
  BenchmarkOptions benchmark;
  unsigned threads = 0;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

RunConfig default_run_config();

/// Merges `overrides` over the file contents (if any) over the defaults.
RunConfig resolve_run_config(const std::string& config_path, const nlohmann::json& overrides);

/// Runs the benchmark and writes report.csv, report.txt,
/// models/<family>.model, data/train.csv, data/test.csv, plots/*.csv (for the
/// random forest, or the top row without one) and run_config.json.
EvalReport run_benchmark_to_dir(const RunConfig& config, const std::string& out_dir, bool force);

/// Copies `input_csv` with a CBR_pred column appended.
void predict_csv(const FittedModel& model, const std::string& input_csv,
                 const std::string& out_csv, bool force);

struct HistogramBin {
  double left = 0;
  double right = 0;
  std::size_t count = 0;
};

/// Half-open bins [left, right) of the given width anchored at 0, covering
/// every bin from the one holding min(values) to the one holding max(values).
std::vector<HistogramBin> histogram(std::span<const double> values, double width);

/// Writes scatter.csv, errors_hist.csv and series.csv for a labelled set.
void write_plot_data(const FittedModel& model, const Dataset& test, const std::string& out_dir,
                     bool force);

}  // namespace cbrkit

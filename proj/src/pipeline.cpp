/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "cbrkit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cbrkit/parallel.hpp"

namespace cbrkit {
namespace fs = std::filesystem;
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content, bool force) {
  if (!force && fs::exists(path)) {
    throw Error(ErrorCode::Exists, "refusing to overwrite '" + path.string() + "' (use --force)");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory '" + dir.string() + "': " + ec.message());
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::Parse, where + ": unknown key '" + key + "'");
  }
}

Family family_or_throw(const std::string& name) {
  auto f = parse_family(name);
  if (!f) {
    throw Error(ErrorCode::InvalidArgument,
                "unknown model family '" + name + "'; valid names: " + family_list());
  }
  return *f;
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
  nlohmann::json families = nlohmann::json::array();
  for (auto f : benchmark.families) families.push_back(family_name(f));
  nlohmann::json grids = nlohmann::json::object();
  for (const auto& [family, grid] : benchmark.grids) {
    nlohmann::json g = nlohmann::json::object();
    for (const auto& [key, values] : grid) {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& v : values) list.push_back(param_to_json(v));
      g[key] = list;
    }
    grids[std::string(family_name(family))] = g;
  }
  return {{"data", data_path},
          {"generator",
           {{"n_samples", generator.n_samples}, {"seed", generator.seed}, {"noise_sd", generator.noise_sd}}},
          {"families", families},
          {"grids", grids},
          {"n_seeds", benchmark.n_seeds},
          {"seed_base", benchmark.seed_base},
          {"cv_folds", benchmark.cv_folds},
          {"split",
           {{"train_fraction", benchmark.split.train_fraction},
            {"seed", benchmark.split.seed},
            {"fixed_split", benchmark.split.fixed_split}}},
          {"threads", threads}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c = default_run_config();
  try {
    reject_unknown(j, {"data", "generator", "families", "grids", "n_seeds", "seed_base", "cv_folds",
                       "split", "threads"},
                   "config");
    if (j.contains("data")) c.data_path = j.at("data").get<std::string>();
    if (j.contains("generator")) {
      const auto& g = j.at("generator");
      reject_unknown(g, {"n_samples", "seed", "noise_sd"}, "config.generator");
      c.generator.n_samples = g.value("n_samples", c.generator.n_samples);
      c.generator.seed = g.value("seed", c.generator.seed);
      c.generator.noise_sd = g.value("noise_sd", c.generator.noise_sd);
    }
    if (j.contains("families")) {
      c.benchmark.families.clear();
      for (const auto& name : j.at("families")) {
        c.benchmark.families.push_back(family_or_throw(name.get<std::string>()));
      }
    }
    if (j.contains("grids")) {
      c.benchmark.grids.clear();
      for (const auto& [name, g] : j.at("grids").items()) {
        ParamGrid grid;
        for (const auto& [key, values] : g.items()) {
          if (!values.is_array() || values.empty()) {
            throw Error(ErrorCode::Parse, "config.grids." + name + "." + key + " must be a non-empty list");
          }
          for (const auto& v : values) grid[key].push_back(param_from_json(v));
        }
        c.benchmark.grids[family_or_throw(name)] = std::move(grid);
      }
    }
    c.benchmark.n_seeds = j.value("n_seeds", c.benchmark.n_seeds);
    c.benchmark.seed_base = j.value("seed_base", c.benchmark.seed_base);
    c.benchmark.cv_folds = j.value("cv_folds", c.benchmark.cv_folds);
    if (j.contains("split")) {
      const auto& s = j.at("split");
      reject_unknown(s, {"train_fraction", "seed", "fixed_split"}, "config.split");
      c.benchmark.split.train_fraction = s.value("train_fraction", c.benchmark.split.train_fraction);
      c.benchmark.split.seed = s.value("seed", c.benchmark.split.seed);
      c.benchmark.split.fixed_split = s.value("fixed_split", c.benchmark.split.fixed_split);
    }
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("invalid config: ") + e.what());
  }
  if (c.benchmark.n_seeds < 1) throw Error(ErrorCode::InvalidArgument, "n_seeds must be >= 1");
  if (c.benchmark.cv_folds < 2) throw Error(ErrorCode::InvalidArgument, "cv_folds must be >= 2");
  const double f = c.benchmark.split.train_fraction;
  if (!(f > 0 && f < 1)) throw Error(ErrorCode::InvalidArgument, "train_fraction must be in (0, 1)");
  return c;
}

RunConfig default_run_config() {
  RunConfig c;
  c.benchmark.families.assign(all_families().begin(), all_families().end());
  return c;
}

RunConfig resolve_run_config(const std::string& config_path, const nlohmann::json& overrides) {
  nlohmann::json merged = default_run_config().to_json();
  if (!config_path.empty()) {
    nlohmann::json file;
    try {
      file = nlohmann::json::parse(read_file(config_path));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Parse, config_path + ": " + e.what());
    }
    if (!file.is_object()) throw Error(ErrorCode::Parse, config_path + ": config must be a JSON object");
    merged.merge_patch(file);
  }
  if (!overrides.is_null()) merged.merge_patch(overrides);
  return RunConfig::from_json(merged);
}

EvalReport run_benchmark_to_dir(const RunConfig& config, const std::string& out_dir, bool force) {
  const fs::path root(out_dir);
  if (!force && fs::exists(root / "report.csv")) {
    throw Error(ErrorCode::Exists, "'" + out_dir + "' already holds a report (use --force)");
  }
  set_thread_count(config.threads);
  const Dataset data = config.data_path.empty() ? generate_synthetic(config.generator)
                                                : load_csv(config.data_path);
  auto result = run_benchmark(data, config.benchmark);

  make_dirs(root / "models");
  make_dirs(root / "data");
  make_dirs(root / "plots");
  write_file(root / "report.csv", report_csv(result.report), true);
  write_file(root / "report.txt", report_text(result.report), true);
  for (const auto& [family, model] : result.first_seed_models) {
    write_file(root / "models" / (std::string(family_name(family)) + ".model"), model.serialize(), true);
  }
  save_csv((root / "data" / "train.csv").string(), result.first_seed_train, true);
  save_csv((root / "data" / "test.csv").string(), result.first_seed_test, true);

  const FittedModel* plotted = nullptr;
  if (auto it = result.first_seed_models.find(Family::RandomForest); it != result.first_seed_models.end()) {
    plotted = &it->second;
  } else {
    for (const auto& row : result.report.rows) {
      if (auto it2 = result.first_seed_models.find(row.family); it2 != result.first_seed_models.end()) {
        plotted = &it2->second;
        break;
      }
    }
  }
  if (plotted) write_plot_data(*plotted, result.first_seed_test, (root / "plots").string(), true);
  write_file(root / "run_config.json", config.to_json().dump(2) + "\n", true);
  return result.report;
}

void predict_csv(const FittedModel& model, const std::string& input_csv, const std::string& out_csv,
                 bool force) {
  const std::string text = read_file(input_csv);
  std::istringstream parse_in(text);
  const Dataset data = parse_csv(parse_in, input_csv);
  const auto pred = model.predict(data);

  std::istringstream lines(text);
  std::string line, out;
  bool header = true;
  std::size_t row = 0;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header) {
      if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
      out += line + ",CBR_pred\n";
      header = false;
      continue;
    }
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out += line + "," + format_number(pred[row++]) + "\n";
  }
  write_file(out_csv, out, force);
}

std::vector<HistogramBin> histogram(std::span<const double> values, double width) {
  if (!(width > 0)) throw Error(ErrorCode::InvalidArgument, "bin width must be positive");
  if (values.empty()) return {};
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite value in histogram");
  }
  const auto [lo, hi] = std::ranges::minmax(values);
  const auto first = static_cast<long long>(std::floor(lo / width));
  const auto last = static_cast<long long>(std::floor(hi / width));
  std::vector<HistogramBin> bins;
  for (long long b = first; b <= last; ++b) {
    bins.push_back({static_cast<double>(b) * width, static_cast<double>(b + 1) * width, 0});
  }
  for (double v : values) ++bins[static_cast<std::size_t>(static_cast<long long>(std::floor(v / width)) - first)].count;
  return bins;
}

void write_plot_data(const FittedModel& model, const Dataset& test, const std::string& out_dir,
                     bool force) {
  if (!test.has_target()) throw Error(ErrorCode::InvalidArgument, "plot data needs a CBR column in the test file");
  const auto pred = model.predict(test);
  const auto y = test.targets();
  make_dirs(out_dir);

  std::string scatter = "actual,predicted\n", series = "sample_index,actual,predicted\n";
  std::vector<double> residuals(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    scatter += format_number(y[i]) + "," + format_number(pred[i]) + "\n";
    series += std::to_string(i + 1) + "," + format_number(y[i]) + "," + format_number(pred[i]) + "\n";
    residuals[i] = y[i] - pred[i];
  }
  std::string hist = "bin_left,bin_right,count\n";
  for (const auto& b : histogram(residuals, 5.0)) {
    hist += format_number(b.left) + "," + format_number(b.right) + "," + std::to_string(b.count) + "\n";
  }
  const fs::path dir(out_dir);
  for (const char* name : {"scatter.csv", "errors_hist.csv", "series.csv"}) {
    if (!force && fs::exists(dir / name)) {
      throw Error(ErrorCode::Exists, "refusing to overwrite '" + (dir / name).string() + "' (use --force)");
    }
  }
  write_file(dir / "scatter.csv", scatter, true);
  write_file(dir / "errors_hist.csv", hist, true);
  write_file(dir / "series.csv", series, true);
}

}  // namespace cbrkit

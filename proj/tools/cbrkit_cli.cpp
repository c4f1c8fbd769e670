/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cbrkit/cbrkit.h"

namespace {

struct CliError {
  std::string message;
};

void check(cbr_status status) {
  if (status != CBR_OK) throw CliError{cbr_last_error()};
}

struct ModelHandle {
  cbr_model* ptr = nullptr;
  ~ModelHandle() { cbr_model_free(ptr); }
};

struct ConfigHandle {
  cbr_config* ptr = nullptr;
  ~ConfigHandle() { cbr_config_free(ptr); }
};

void resolve(const std::string& config_path, const nlohmann::json& overrides, ConfigHandle& out) {
  const std::string text = overrides.dump();
  check(cbr_config_resolve(config_path.empty() ? nullptr : config_path.c_str(), text.c_str(), &out.ptr));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soil CBR regression toolkit: synthetic data, model benchmarks and predictions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cbr_version()));

  // Global flags; accepted before or after the subcommand.
  std::optional<std::uint64_t> seed;
  std::string out;
  bool force = false;
  std::string config_path;
  bool fixed_split = false;
  std::optional<unsigned> threads;
  app.fallthrough();
  app.add_option("--seed", seed, "Generator seed (generate) or first benchmark seed (benchmark)");
  app.add_option("--out", out, "Output file or directory");
  app.add_flag("--force", force, "Overwrite existing outputs");
  app.add_option("--config", config_path, "JSON run configuration; flags override it")
      ->check(CLI::ExistingFile);
  app.add_flag("--fixed-split", fixed_split, "Keep one train/test split across benchmark seeds");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* gen = app.add_subcommand("generate", "Write a synthetic soil dataset as CSV");
  std::optional<std::size_t> n_samples;
  std::optional<double> noise_sd;
  gen->add_option("--n", n_samples, "Number of samples (>= 10)");
  gen->add_option("--noise-sd", noise_sd, "Standard deviation of the CBR noise");

  auto* bench = app.add_subcommand("benchmark", "Grid-search and evaluate model families");
  std::string data_path, families;
  std::optional<std::size_t> n_seeds, cv_folds;
  std::optional<double> train_fraction;
  std::optional<std::uint64_t> split_seed;
  bench->add_option("--data", data_path, "Labelled CSV; the synthetic generator is used when omitted");
  bench->add_option("--families", families, "Comma-separated families (default: all)");
  bench->add_option("--seeds", n_seeds, "Number of repeated seeds");
  bench->add_option("--cv", cv_folds, "Cross-validation folds");
  bench->add_option("--train-fraction", train_fraction, "Training share of the split");
  bench->add_option("--split-seed", split_seed, "Split seed used with --fixed-split");

  auto* pred = app.add_subcommand("predict", "Append CBR_pred predictions to a CSV file");
  std::string model_path, input_path;
  pred->add_option("--model", model_path, "Model file")->required();
  pred->add_option("--input", input_path, "Input CSV (CBR column optional)")->required();

  auto* plot = app.add_subcommand("plotdata", "Write scatter, residual histogram and series data");
  std::string test_path;
  plot->add_option("--model", model_path, "Model file")->required();
  plot->add_option("--test", test_path, "Labelled test CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (out.empty()) throw CliError{"--out is required"};
    if (threads) cbr_set_threads(*threads);

    if (gen->parsed()) {
      nlohmann::json gen_over = nlohmann::json::object();
      if (n_samples) gen_over["n_samples"] = *n_samples;
      if (seed) gen_over["seed"] = *seed;
      if (noise_sd) gen_over["noise_sd"] = *noise_sd;
      ConfigHandle cfg;
      resolve(config_path, {{"generator", gen_over}}, cfg);
      check(cbr_generate_csv(cfg.ptr, out.c_str(), force));
      std::cout << "wrote " << out << "\n";
    } else if (bench->parsed()) {
      nlohmann::json over = nlohmann::json::object();
      if (!data_path.empty()) over["data"] = data_path;
      if (!families.empty()) over["families"] = split_list(families);
      if (seed) over["seed_base"] = *seed;
      if (n_seeds) over["n_seeds"] = *n_seeds;
      if (cv_folds) over["cv_folds"] = *cv_folds;
      nlohmann::json split = nlohmann::json::object();
      if (train_fraction) split["train_fraction"] = *train_fraction;
      if (fixed_split) split["fixed_split"] = true;
      if (split_seed) split["seed"] = *split_seed;
      if (!split.empty()) over["split"] = split;
      if (threads) over["threads"] = *threads;
      ConfigHandle cfg;
      resolve(config_path, over, cfg);
      check(cbr_benchmark_run(cfg.ptr, out.c_str(), force));
      std::ifstream report(out + "/report.txt");
      std::cout << report.rdbuf();
    } else if (pred->parsed()) {
      ModelHandle model;
      check(cbr_model_load(model_path.c_str(), &model.ptr));
      check(cbr_predict_csv(model.ptr, input_path.c_str(), out.c_str(), force));
      std::cout << "wrote " << out << "\n";
    } else if (plot->parsed()) {
      ModelHandle model;
      check(cbr_model_load(model_path.c_str(), &model.ptr));
      check(cbr_plotdata(model.ptr, test_path.c_str(), out.c_str(), force));
      std::cout << "wrote scatter.csv, errors_hist.csv, series.csv to " << out << "\n";
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return 1;
  }
  return 0;
}

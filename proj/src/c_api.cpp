/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "cbrkit/cbrkit.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "cbrkit/data.hpp"
#include "cbrkit/model.hpp"
#include "cbrkit/parallel.hpp"
#include "cbrkit/pipeline.hpp"

struct cbr_dataset {
  cbrkit::Dataset data;
};

struct cbr_model {
  cbrkit::FittedModel model;
  std::string family;
};

struct cbr_config {
  cbrkit::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

cbr_status to_status(cbrkit::ErrorCode code) {
  using cbrkit::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return CBR_ERR_INVALID_ARGUMENT;
    case ErrorCode::Io: return CBR_ERR_IO;
    case ErrorCode::Parse: return CBR_ERR_PARSE;
    case ErrorCode::Validation: return CBR_ERR_VALIDATION;
    case ErrorCode::Degenerate: return CBR_ERR_DEGENERATE;
    case ErrorCode::Numerical: return CBR_ERR_NUMERICAL;
    case ErrorCode::Exists: return CBR_ERR_EXISTS;
  }
  return CBR_ERR_INTERNAL;
}

cbr_status fail(cbr_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs body, translating every exception into a status plus message.
template <class F>
cbr_status guarded(F&& body) {
  try {
    body();
    return CBR_OK;
  } catch (const cbrkit::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(CBR_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CBR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CBR_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CBR_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (!p) throw cbrkit::Error(cbrkit::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

nlohmann::json parse_json_arg(const char* text, const char* what) {
  if (!text || !*text) return nlohmann::json();
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw cbrkit::Error(cbrkit::ErrorCode::Parse, std::string(what) + ": " + e.what());
  }
}

}  // namespace

extern "C" {

const char* cbr_version(void) { return CBRKIT_VERSION_STRING; }

const char* cbr_last_error(void) { return g_last_error.c_str(); }

const char* cbr_status_name(cbr_status status) {
  switch (status) {
    case CBR_OK: return "ok";
    case CBR_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CBR_ERR_IO: return "i/o error";
    case CBR_ERR_PARSE: return "parse error";
    case CBR_ERR_VALIDATION: return "validation error";
    case CBR_ERR_DEGENERATE: return "degenerate input";
    case CBR_ERR_NUMERICAL: return "numerical failure";
    case CBR_ERR_EXISTS: return "already exists";
    case CBR_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* cbr_family_names(void) {
  static const std::string names = cbrkit::family_list();
  return names.c_str();
}

void cbr_set_threads(unsigned threads) { cbrkit::set_thread_count(threads); }

cbr_status cbr_dataset_load_csv(const char* path, cbr_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new cbr_dataset{cbrkit::load_csv(path)};
  });
}

cbr_status cbr_dataset_generate(size_t n_samples, uint64_t seed, double noise_sd, cbr_dataset** out) {
  return guarded([&] {
    require(out, "out");
    *out = new cbr_dataset{cbrkit::generate_synthetic({n_samples, seed, noise_sd})};
  });
}

cbr_status cbr_dataset_save_csv(const cbr_dataset* data, const char* path, int force) {
  return guarded([&] {
    require(data, "data");
    require(path, "path");
    cbrkit::save_csv(path, data->data, force != 0);
  });
}

cbr_status cbr_dataset_split(const cbr_dataset* data, double train_fraction, uint64_t seed,
                             cbr_dataset** train, cbr_dataset** test) {
  return guarded([&] {
    require(data, "data");
    require(train, "train");
    require(test, "test");
    cbrkit::SplitSpec spec;
    spec.train_fraction = train_fraction;
    spec.seed = seed;
    auto [tr, te] = cbrkit::split(data->data, spec);
    auto* a = new cbr_dataset{std::move(tr)};
    *test = new cbr_dataset{std::move(te)};
    *train = a;
  });
}

size_t cbr_dataset_size(const cbr_dataset* data) { return data ? data->data.size() : 0; }

int cbr_dataset_has_target(const cbr_dataset* data) { return data && data->data.has_target() ? 1 : 0; }

cbr_status cbr_dataset_targets(const cbr_dataset* data, double* out, size_t capacity) {
  return guarded([&] {
    require(data, "data");
    if (!data->data.has_target()) {
      throw cbrkit::Error(cbrkit::ErrorCode::InvalidArgument, "dataset has no CBR column");
    }
    const auto y = data->data.targets();
    if (capacity < y.size()) throw cbrkit::Error(cbrkit::ErrorCode::InvalidArgument, "output buffer too small");
    if (!y.empty()) {
      require(out, "out");
      std::memcpy(out, y.data(), y.size() * sizeof(double));
    }
  });
}

void cbr_dataset_free(cbr_dataset* data) { delete data; }

cbr_status cbr_model_fit(const char* family, const char* params_json, const cbr_dataset* train,
                         uint64_t seed, cbr_model** out) {
  return guarded([&] {
    require(family, "family");
    require(train, "train");
    require(out, "out");
    auto f = cbrkit::parse_family(family);
    if (!f) {
      throw cbrkit::Error(cbrkit::ErrorCode::InvalidArgument, std::string("unknown model family '") + family +
                                                                 "'; valid names: " + cbrkit::family_list());
    }
    const auto pj = parse_json_arg(params_json, "params");
    const auto params = pj.is_null() ? cbrkit::ParamSet{} : cbrkit::params_from_json(pj);
    auto model = cbrkit::fit_model(*f, params, train->data, seed);
    *out = new cbr_model{std::move(model), family};
  });
}

cbr_status cbr_model_load(const char* path, cbr_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto model = cbrkit::FittedModel::load(path);
    std::string name(cbrkit::family_name(model.family()));
    *out = new cbr_model{std::move(model), std::move(name)};
  });
}

cbr_status cbr_model_save(const cbr_model* model, const char* path, int force) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    model->model.save(path, force != 0);
  });
}

cbr_status cbr_model_predict(const cbr_model* model, const cbr_dataset* data, double* out,
                             size_t capacity) {
  return guarded([&] {
    require(model, "model");
    require(data, "data");
    if (capacity < data->data.size()) {
      throw cbrkit::Error(cbrkit::ErrorCode::InvalidArgument, "output buffer too small");
    }
    const auto pred = model->model.predict(data->data);
    if (!pred.empty()) {
      require(out, "out");
      std::memcpy(out, pred.data(), pred.size() * sizeof(double));
    }
  });
}

const char* cbr_model_family(const cbr_model* model) { return model ? model->family.c_str() : ""; }

void cbr_model_free(cbr_model* model) { delete model; }

cbr_status cbr_predict_csv(const cbr_model* model, const char* input_csv, const char* out_csv, int force) {
  return guarded([&] {
    require(model, "model");
    require(input_csv, "input path");
    require(out_csv, "output path");
    cbrkit::predict_csv(model->model, input_csv, out_csv, force != 0);
  });
}

cbr_status cbr_plotdata(const cbr_model* model, const char* test_csv, const char* out_dir, int force) {
  return guarded([&] {
    require(model, "model");
    require(test_csv, "test path");
    require(out_dir, "output directory");
    cbrkit::write_plot_data(model->model, cbrkit::load_csv(test_csv), out_dir, force != 0);
  });
}

cbr_status cbr_config_resolve(const char* config_path, const char* overrides_json, cbr_config** out) {
  return guarded([&] {
    require(out, "out");
    const auto overrides = parse_json_arg(overrides_json, "overrides");
    *out = new cbr_config{cbrkit::resolve_run_config(config_path ? config_path : "", overrides)};
  });
}

cbr_status cbr_config_json(const cbr_config* config, char** out_json) {
  return guarded([&] {
    require(config, "config");
    require(out_json, "out_json");
    const auto text = config->config.to_json().dump(2);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out_json = buf;
  });
}

void cbr_config_free(cbr_config* config) { delete config; }

void cbr_string_free(char* text) { std::free(text); }

cbr_status cbr_generate_csv(const cbr_config* config, const char* out_path, int force) {
  return guarded([&] {
    require(config, "config");
    require(out_path, "output path");
    cbrkit::save_csv(out_path, cbrkit::generate_synthetic(config->config.generator), force != 0);
  });
}

cbr_status cbr_benchmark_run(const cbr_config* config, const char* out_dir, int force) {
  return guarded([&] {
    require(config, "config");
    require(out_dir, "output directory");
    cbrkit::run_benchmark_to_dir(config->config, out_dir, force != 0);
  });
}

}  // extern "C"

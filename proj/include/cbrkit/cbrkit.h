/*
 * Copyright 2026 The cbrkit Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#ifndef CBRKIT_CBRKIT_H
#define CBRKIT_CBRKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(CBRKIT_BUILDING_LIBRARY)
#define CBR_API __attribute__((visibility("default")))
#else
#define CBR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; on failure cbr_last_error() holds a
 * message for the calling thread until its next failing call. */
typedef enum cbr_status {
  CBR_OK = 0,
  CBR_ERR_INVALID_ARGUMENT = 1,
  CBR_ERR_IO = 2,
  CBR_ERR_PARSE = 3,
  CBR_ERR_VALIDATION = 4,
  CBR_ERR_DEGENERATE = 5,
  CBR_ERR_NUMERICAL = 6,
  CBR_ERR_EXISTS = 7,
  CBR_ERR_INTERNAL = 8
} cbr_status;

typedef struct cbr_dataset cbr_dataset;
typedef struct cbr_model cbr_model;
typedef struct cbr_config cbr_config;

CBR_API const char* cbr_version(void);
CBR_API const char* cbr_last_error(void);
CBR_API const char* cbr_status_name(cbr_status status);
/* Comma-separated model family names accepted by cbr_model_fit. */
CBR_API const char* cbr_family_names(void);
/* 0 selects hardware concurrency. */
CBR_API void cbr_set_threads(unsigned threads);

/* Datasets */
CBR_API cbr_status cbr_dataset_load_csv(const char* path, cbr_dataset** out);
CBR_API cbr_status cbr_dataset_generate(size_t n_samples, uint64_t seed, double noise_sd,
                                        cbr_dataset** out);
CBR_API cbr_status cbr_dataset_save_csv(const cbr_dataset* data, const char* path, int force);
CBR_API cbr_status cbr_dataset_split(const cbr_dataset* data, double train_fraction,
                                     uint64_t seed, cbr_dataset** train, cbr_dataset** test);
CBR_API size_t cbr_dataset_size(const cbr_dataset* data);
CBR_API int cbr_dataset_has_target(const cbr_dataset* data);
/* Copies the targets into out[0..capacity); fails if capacity is too small. */
CBR_API cbr_status cbr_dataset_targets(const cbr_dataset* data, double* out, size_t capacity);
CBR_API void cbr_dataset_free(cbr_dataset* data);

/* Models. params_json is a JSON object of hyperparameters ("{}" or NULL for
 * the family defaults). */
CBR_API cbr_status cbr_model_fit(const char* family, const char* params_json,
                                 const cbr_dataset* train, uint64_t seed, cbr_model** out);
CBR_API cbr_status cbr_model_load(const char* path, cbr_model** out);
CBR_API cbr_status cbr_model_save(const cbr_model* model, const char* path, int force);
CBR_API cbr_status cbr_model_predict(const cbr_model* model, const cbr_dataset* data,
                                     double* out, size_t capacity);
CBR_API const char* cbr_model_family(const cbr_model* model);
CBR_API void cbr_model_free(cbr_model* model);

/* File-level operations behind the command-line tool. */
CBR_API cbr_status cbr_predict_csv(const cbr_model* model, const char* input_csv,
                                   const char* out_csv, int force);
CBR_API cbr_status cbr_plotdata(const cbr_model* model, const char* test_csv,
                                const char* out_dir, int force);

/* Run configuration: defaults, then the JSON file at config_path (may be
 * NULL), then the overrides JSON object (may be NULL). */
CBR_API cbr_status cbr_config_resolve(const char* config_path, const char* overrides_json,
                                      cbr_config** out);
/* Resolved configuration as JSON; release with cbr_string_free. */
CBR_API cbr_status cbr_config_json(const cbr_config* config, char** out_json);
CBR_API void cbr_config_free(cbr_config* config);
CBR_API void cbr_string_free(char* text);

/* Generates the synthetic dataset described by the config's generator
 * section and writes it as CSV. */
CBR_API cbr_status cbr_generate_csv(const cbr_config* config, const char* out_path, int force);
/* Full grid-search benchmark; writes report files, models and plot data. */
CBR_API cbr_status cbr_benchmark_run(const cbr_config* config, const char* out_dir, int force);

#ifdef __cplusplus
}
#endif

#endif /* CBRKIT_CBRKIT_H */

/*
 * Copyright 2026 The ddph Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the ddph shared library: distributed-DP federated training
 * of a linear SVM on the Breast Cancer Wisconsin data.
 *
 * Objects are opaque handles created by *_load / *_parse / *_run functions
 * and released with the matching *_free. Every fallible call returns a
 * ddph_status; on failure ddph_last_error() describes the problem. The error
 * text is per thread and valid until the next failing call on that thread.
 *
 * Functions that produce text use the snprintf convention: up to `capacity`
 * bytes (NUL included) are written to `buffer`, and `*required` (if non-NULL)
 * receives the full length excluding the NUL. Passing buffer=NULL,
 * capacity=0 queries the length.
 */

#ifndef DDPH_DDPH_H_
#define DDPH_DDPH_H_

#include <stddef.h>
#include <stdint.h>

#if defined(DDPH_BUILDING_LIBRARY)
#define DDPH_API __attribute__((visibility("default")))
#else
#define DDPH_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as the CLI's process exit codes. */
typedef enum ddph_status {
  DDPH_OK = 0,
  DDPH_ERROR_CONFIG = 1,
  DDPH_ERROR_DATA = 2,
  DDPH_ERROR_RUN = 3,
  DDPH_ERROR_INVALID_ARGUMENT = 4
} ddph_status;

typedef struct ddph_config ddph_config;
typedef struct ddph_results ddph_results;
typedef struct ddph_dataset ddph_dataset;

DDPH_API const char* ddph_version(void);
DDPH_API const char* ddph_last_error(void);

/* ---- experiment configuration ------------------------------------------ */

/* Parses a JSON config file. A non-NULL, non-empty dataset_override replaces
 * the file's dataset_path (which may then be omitted). */
DDPH_API ddph_status ddph_config_load(const char* path,
                                      const char* dataset_override,
                                      ddph_config** out);
DDPH_API ddph_status ddph_config_parse(const char* json_text,
                                       const char* dataset_override,
                                       ddph_config** out);
DDPH_API void ddph_config_free(ddph_config* config);

DDPH_API ddph_status ddph_config_set_output_path(ddph_config* config,
                                                 const char* path);
/* Adds `offset` to every entry of the seed list. */
DDPH_API ddph_status ddph_config_apply_seed_offset(ddph_config* config,
                                                   int64_t offset);
DDPH_API ddph_status ddph_config_get_output_path(const ddph_config* config,
                                                 char* buffer, size_t capacity,
                                                 size_t* required);
/* The fully materialized configuration as JSON. */
DDPH_API ddph_status ddph_config_to_json(const ddph_config* config,
                                         char* buffer, size_t capacity,
                                         size_t* required);
/* Budget report for every (epsilon, n_clients) grid point. */
DDPH_API ddph_status ddph_config_budget_report(const ddph_config* config,
                                               char* buffer, size_t capacity,
                                               size_t* required);

/* ---- sweeps ------------------------------------------------------------- */

DDPH_API ddph_status ddph_sweep_run(const ddph_config* config,
                                    ddph_results** out);
DDPH_API void ddph_results_free(ddph_results* results);
DDPH_API size_t ddph_results_row_count(const ddph_results* results);
/* Row fields in sorted CSV order. asr is NaN when the attack is disabled;
 * epsilon is +inf for the non-private reference. */
DDPH_API ddph_status ddph_results_row(const ddph_results* results, size_t index,
                                      double* epsilon, int* n_clients,
                                      int64_t* seed, int* round,
                                      double* test_accuracy,
                                      double* test_hinge_loss,
                                      double* spent_epsilon, double* asr,
                                      int* topup_events);
DDPH_API ddph_status ddph_results_to_csv(const ddph_results* results,
                                         char* buffer, size_t capacity,
                                         size_t* required);
DDPH_API ddph_status ddph_results_write_csv(const ddph_results* results,
                                            const char* path);

/* ---- dataset ------------------------------------------------------------ */

DDPH_API ddph_status ddph_dataset_load(const char* path, ddph_dataset** out);
DDPH_API void ddph_dataset_free(ddph_dataset* dataset);
DDPH_API size_t ddph_dataset_raw_count(const ddph_dataset* dataset);
DDPH_API size_t ddph_dataset_clean_count(const ddph_dataset* dataset);
/* Label counts of the raw (with_missing != 0) or cleaned records. */
DDPH_API ddph_status ddph_dataset_class_counts(const ddph_dataset* dataset,
                                               int with_missing,
                                               size_t* benign,
                                               size_t* malignant);

/* ---- privacy calculator ------------------------------------------------- */

DDPH_API ddph_status ddph_calibrate_sigma_eff(double clip_bound, int n_clients,
                                              double eps_round,
                                              double delta_round,
                                              double* sigma_eff);
DDPH_API ddph_status ddph_client_noise_sigma(double sigma_eff, int n_clients,
                                             double* sigma_client);
DDPH_API ddph_status ddph_adaptive_topup(int received, int expected,
                                         double sigma_eff, double* topup);
/* Report for a spec with all T rounds charged. */
DDPH_API ddph_status ddph_budget_report(double epsilon_total,
                                        double delta_total, double clip_bound,
                                        int rounds, int n_clients,
                                        char* buffer, size_t capacity,
                                        size_t* required);

#ifdef __cplusplus
}
#endif

#endif /* DDPH_DDPH_H_ */

// Copyright 2026 The ddph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ddph/ddph.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <tuple>
#include <vector>

#include "ddph/dataset.hpp"
#include "ddph/errors.hpp"
#include "ddph/experiment.hpp"
#include "ddph/federation.hpp"
#include "ddph/privacy.hpp"

struct ddph_config {
  ddph::ExperimentConfig cfg;
};

struct ddph_results {
  std::vector<ddph::MetricsRow> rows;  // sorted as in the CSV
};

struct ddph_dataset {
  std::vector<ddph::RawRecord> raw;
  std::vector<ddph::RawRecord> clean;
};

namespace {

thread_local std::string g_last_error;

ddph_status Fail(ddph_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename Body>
ddph_status Guard(Body&& body) {
  try {
    body();
    return DDPH_OK;
  } catch (const ddph::ConfigError& e) {
    return Fail(DDPH_ERROR_CONFIG, e.what());
  } catch (const ddph::DataError& e) {
    return Fail(DDPH_ERROR_DATA, e.what());
  } catch (const ddph::ContractViolation& e) {
    return Fail(DDPH_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(DDPH_ERROR_RUN, "out of memory");
  } catch (const std::exception& e) {
    return Fail(DDPH_ERROR_RUN, e.what());
  } catch (...) {
    return Fail(DDPH_ERROR_RUN, "unknown error");
  }
}

ddph_status CopyOut(const std::string& text, char* buffer, std::size_t capacity,
                    std::size_t* required) {
  if (required != nullptr) *required = text.size();
  if (buffer == nullptr || capacity == 0) return DDPH_OK;
  const std::size_t n = std::min(text.size(), capacity - 1);
  std::memcpy(buffer, text.data(), n);
  buffer[n] = '\0';
  return DDPH_OK;
}

ddph_status NullArgument(const char* name) {
  return Fail(DDPH_ERROR_INVALID_ARGUMENT, std::string(name) + " is NULL");
}

}  // namespace

extern "C" {

const char* ddph_version(void) { return "0.1.0"; }

const char* ddph_last_error(void) { return g_last_error.c_str(); }

ddph_status ddph_config_load(const char* path, const char* dataset_override,
                             ddph_config** out) {
  if (path == nullptr) return NullArgument("path");
  if (out == nullptr) return NullArgument("out");
  *out = nullptr;
  return Guard([&] {
    auto handle = std::make_unique<ddph_config>();
    handle->cfg = ddph::ParseConfig(path, dataset_override ? dataset_override : "");
    *out = handle.release();
  });
}

ddph_status ddph_config_parse(const char* json_text, const char* dataset_override,
                              ddph_config** out) {
  if (json_text == nullptr) return NullArgument("json_text");
  if (out == nullptr) return NullArgument("out");
  *out = nullptr;
  return Guard([&] {
    auto handle = std::make_unique<ddph_config>();
    handle->cfg =
        ddph::ParseConfigJson(json_text, dataset_override ? dataset_override : "");
    *out = handle.release();
  });
}

void ddph_config_free(ddph_config* config) { delete config; }

ddph_status ddph_config_set_output_path(ddph_config* config, const char* path) {
  if (config == nullptr) return NullArgument("config");
  if (path == nullptr || *path == '\0') {
    return Fail(DDPH_ERROR_CONFIG, "output_path: must not be empty");
  }
  config->cfg.output_path = path;
  return DDPH_OK;
}

ddph_status ddph_config_apply_seed_offset(ddph_config* config, int64_t offset) {
  if (config == nullptr) return NullArgument("config");
  for (int64_t& seed : config->cfg.seeds) seed += offset;
  return DDPH_OK;
}

ddph_status ddph_config_get_output_path(const ddph_config* config, char* buffer,
                                        size_t capacity, size_t* required) {
  if (config == nullptr) return NullArgument("config");
  return CopyOut(config->cfg.output_path, buffer, capacity, required);
}

ddph_status ddph_config_to_json(const ddph_config* config, char* buffer,
                                size_t capacity, size_t* required) {
  if (config == nullptr) return NullArgument("config");
  std::string text;
  const ddph_status status = Guard([&] { text = ddph::ConfigToJson(config->cfg); });
  if (status != DDPH_OK) return status;
  return CopyOut(text, buffer, capacity, required);
}

ddph_status ddph_config_budget_report(const ddph_config* config, char* buffer,
                                      size_t capacity, size_t* required) {
  if (config == nullptr) return NullArgument("config");
  std::string text;
  const ddph_status status =
      Guard([&] { text = ddph::SweepBudgetReport(config->cfg); });
  if (status != DDPH_OK) return status;
  return CopyOut(text, buffer, capacity, required);
}

ddph_status ddph_sweep_run(const ddph_config* config, ddph_results** out) {
  if (config == nullptr) return NullArgument("config");
  if (out == nullptr) return NullArgument("out");
  *out = nullptr;
  return Guard([&] {
    auto handle = std::make_unique<ddph_results>();
    handle->rows = ddph::SweepPut(config->cfg);
    std::stable_sort(handle->rows.begin(), handle->rows.end(),
                     [](const ddph::MetricsRow& a, const ddph::MetricsRow& b) {
                       return std::tie(a.epsilon, a.n_clients, a.seed, a.round) <
                              std::tie(b.epsilon, b.n_clients, b.seed, b.round);
                     });
    *out = handle.release();
  });
}

void ddph_results_free(ddph_results* results) { delete results; }

size_t ddph_results_row_count(const ddph_results* results) {
  return results == nullptr ? 0 : results->rows.size();
}

ddph_status ddph_results_row(const ddph_results* results, size_t index,
                             double* epsilon, int* n_clients, int64_t* seed,
                             int* round, double* test_accuracy,
                             double* test_hinge_loss, double* spent_epsilon,
                             double* asr, int* topup_events) {
  if (results == nullptr) return NullArgument("results");
  if (index >= results->rows.size()) {
    return Fail(DDPH_ERROR_INVALID_ARGUMENT, "row index out of range");
  }
  const ddph::MetricsRow& row = results->rows[index];
  if (epsilon) *epsilon = row.epsilon;
  if (n_clients) *n_clients = row.n_clients;
  if (seed) *seed = row.seed;
  if (round) *round = row.round;
  if (test_accuracy) *test_accuracy = row.test_accuracy;
  if (test_hinge_loss) *test_hinge_loss = row.test_hinge_loss;
  if (spent_epsilon) *spent_epsilon = row.spent_epsilon;
  if (asr) *asr = row.asr.value_or(std::numeric_limits<double>::quiet_NaN());
  if (topup_events) *topup_events = row.topup_events;
  return DDPH_OK;
}

ddph_status ddph_results_to_csv(const ddph_results* results, char* buffer,
                                size_t capacity, size_t* required) {
  if (results == nullptr) return NullArgument("results");
  std::string text;
  const ddph_status status = Guard([&] { text = ddph::FormatCsv(results->rows); });
  if (status != DDPH_OK) return status;
  return CopyOut(text, buffer, capacity, required);
}

ddph_status ddph_results_write_csv(const ddph_results* results, const char* path) {
  if (results == nullptr) return NullArgument("results");
  if (path == nullptr) return NullArgument("path");
  return Guard([&] { ddph::EmitCsv(results->rows, path); });
}

ddph_status ddph_dataset_load(const char* path, ddph_dataset** out) {
  if (path == nullptr) return NullArgument("path");
  if (out == nullptr) return NullArgument("out");
  *out = nullptr;
  return Guard([&] {
    auto handle = std::make_unique<ddph_dataset>();
    handle->raw = ddph::LoadRaw(path);
    handle->clean = ddph::Clean(handle->raw);
    *out = handle.release();
  });
}

void ddph_dataset_free(ddph_dataset* dataset) { delete dataset; }

size_t ddph_dataset_raw_count(const ddph_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->raw.size();
}

size_t ddph_dataset_clean_count(const ddph_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->clean.size();
}

ddph_status ddph_dataset_class_counts(const ddph_dataset* dataset,
                                      int with_missing, size_t* benign,
                                      size_t* malignant) {
  if (dataset == nullptr) return NullArgument("dataset");
  const ddph::LabelCounts counts =
      ddph::CountClasses(with_missing ? dataset->raw : dataset->clean);
  if (benign) *benign = counts.benign;
  if (malignant) *malignant = counts.malignant;
  return DDPH_OK;
}

ddph_status ddph_calibrate_sigma_eff(double clip_bound, int n_clients,
                                     double eps_round, double delta_round,
                                     double* sigma_eff) {
  if (sigma_eff == nullptr) return NullArgument("sigma_eff");
  return Guard([&] {
    *sigma_eff = ddph::CalibrateSigmaEff(clip_bound, n_clients, eps_round,
                                         delta_round);
  });
}

ddph_status ddph_client_noise_sigma(double sigma_eff, int n_clients,
                                    double* sigma_client) {
  if (sigma_client == nullptr) return NullArgument("sigma_client");
  return Guard([&] { *sigma_client = ddph::ClientNoiseSigma(sigma_eff, n_clients); });
}

ddph_status ddph_adaptive_topup(int received, int expected, double sigma_eff,
                                double* topup) {
  if (topup == nullptr) return NullArgument("topup");
  return Guard([&] { *topup = ddph::AdaptiveTopup(received, expected, sigma_eff); });
}

ddph_status ddph_budget_report(double epsilon_total, double delta_total,
                               double clip_bound, int rounds, int n_clients,
                               char* buffer, size_t capacity, size_t* required) {
  std::string text;
  const ddph_status status = Guard([&] {
    ddph::PrivacySpec spec;
    spec.epsilon_total = epsilon_total;
    spec.delta_total = delta_total;
    spec.clip_bound = clip_bound;
    spec.rounds = rounds;
    spec.n_clients = n_clients;
    spec.Validate();
    ddph::AccountantState state;
    for (int r = 0; r < rounds; ++r) state = ddph::ChargeRound(state, spec);
    text = ddph::BudgetReport(spec, state);
  });
  if (status != DDPH_OK) return status;
  return CopyOut(text, buffer, capacity, required);
}

}  // extern "C"

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

// Privacy-utility sweeps: JSON experiment configs in, metrics CSV out.

#ifndef DDPH_EXPERIMENT_HPP_
#define DDPH_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddph/adversary.hpp"
#include "ddph/dataset.hpp"
#include "ddph/federation.hpp"

namespace ddph {

inline constexpr std::string_view kCsvHeader =
    "epsilon,n_clients,seed,round,test_accuracy,test_hinge_loss,spent_epsilon,"
    "asr,topup_events";

// Fully materialized experiment description. Every field carries a value
// after parsing; nothing downstream applies implicit defaults.
struct ExperimentConfig {
  std::string dataset_path;
  std::string output_path = "put_results.csv";
  double test_fraction = 0.2;
  ShardingSpec sharding;

  // Template for every sweep point; n_clients, privacy.epsilon_total,
  // privacy.n_clients/rounds and master_seed are filled in per point.
  int rounds = 10;
  double delta_total = 1e-5;
  double clip_bound = 1.0;
  double dropout_probability = 0.0;
  bool weighted_aggregation = false;
  bool parallel_clients = false;
  TrainSpec train;

  AttackConfig attack;
  DefenseConfig defense;

  std::vector<double> epsilon_grid = {1, 5, 10, 20, 28, 30, 50};
  std::vector<int> client_grid = {20};
  std::vector<int64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  // Adds one non-private (epsilon = inf) run per (n_clients, seed).
  bool include_reference = true;

  // Throws ConfigError naming the offending field.
  void Validate() const;

  // The federation settings for one sweep point.
  FederationConfig PointConfig(double epsilon, int n_clients, int64_t seed) const;
};

// Strict parse: unknown keys, wrong types and out-of-range values throw
// ConfigError with the dotted field path. Only dataset_path is required; a
// non-empty `dataset_override` replaces it before validation.
ExperimentConfig ParseConfigJson(std::string_view json_text,
                                 std::string_view dataset_override = {});
ExperimentConfig ParseConfig(const std::filesystem::path& path,
                             std::string_view dataset_override = {});

// Serializes every field, defaults included.
std::string ConfigToJson(const ExperimentConfig& cfg);

struct MetricsRow {
  double epsilon = 0.0;  // +inf marks the non-private reference
  int n_clients = 0;
  int64_t seed = 0;
  int round = 0;
  double test_accuracy = 0.0;
  double test_hinge_loss = 0.0;
  double spent_epsilon = 0.0;
  std::optional<double> asr;
  // Rounds so far (inclusive) in which the server had to add top-up noise.
  int topup_events = 0;

  bool operator==(const MetricsRow&) const = default;
};

// Runs every (epsilon, n_clients, seed) point plus the references and
// returns all per-round rows. The test/train split depends only on the seed,
// and the shards only on (seed, n_clients), so points differing in epsilon
// see identical data.
std::vector<MetricsRow> SweepPut(const ExperimentConfig& cfg);

// Same, with the dataset already loaded and cleaned.
std::vector<MetricsRow> SweepPut(const ExperimentConfig& cfg,
                                 const std::vector<FeatureRecord>& data);

// One BudgetReport per (epsilon, n_clients) grid point.
std::string SweepBudgetReport(const ExperimentConfig& cfg);

// Header plus rows sorted by (epsilon, n_clients, seed, round); reals in
// fixed notation with 6 decimals, "inf" for infinite values, empty asr when
// the attack is off.
std::string FormatCsv(std::vector<MetricsRow> rows);

// Writes FormatCsv(rows) to `path`. Empty `rows` is an error and creates no
// file; an unwritable path throws IoError.
void EmitCsv(const std::vector<MetricsRow>& rows,
             const std::filesystem::path& path);

}  // namespace ddph

#endif  // DDPH_EXPERIMENT_HPP_

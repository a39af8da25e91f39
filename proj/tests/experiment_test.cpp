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

#include "ddph/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddph/errors.hpp"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace ddph {
namespace {

using ::testing::HasSubstr;
using ::testing::StartsWith;

std::string ErrorOf(const std::string& json_text) {
  try {
    ParseConfigJson(json_text, DDPH_TEST_DATA);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig SmallConfig() {
  ExperimentConfig cfg = ParseConfigJson(R"({"epsilon_grid": [5, 30], "client_grid": [4, 6],
                                             "seeds": [0, 1], "federation": {"rounds": 3}})",
                                         DDPH_TEST_DATA);
  return cfg;
}

TEST(ParseConfigTest, MinimalFillsDefaults) {
  const ExperimentConfig cfg = ParseConfigJson("{}", DDPH_TEST_DATA);
  EXPECT_EQ(cfg.dataset_path, DDPH_TEST_DATA);
  EXPECT_EQ(cfg.output_path, "put_results.csv");
  EXPECT_EQ(cfg.test_fraction, 0.2);
  EXPECT_EQ(cfg.rounds, 10);
  EXPECT_EQ(cfg.clip_bound, 1.0);
  EXPECT_EQ(cfg.delta_total, 1e-5);
  EXPECT_EQ(cfg.epsilon_grid, (std::vector<double>{1, 5, 10, 20, 28, 30, 50}));
  EXPECT_EQ(cfg.client_grid, std::vector<int>{20});
  EXPECT_EQ(cfg.seeds.size(), 10u);
  EXPECT_TRUE(cfg.include_reference);
  EXPECT_FALSE(cfg.attack.enabled);
}

TEST(ParseConfigTest, ReadsNestedSections) {
  const ExperimentConfig cfg = ParseConfigJson(R"({
      "sharding": {"mode": "label-skew", "alpha": 0.3},
      "federation": {"rounds": 4, "dropout_probability": 0.1, "weighted_aggregation": true},
      "privacy": {"clip_bound": 2.0},
      "train": {"learning_rate": 0.1, "batch_mode": "full", "local_epochs": 2},
      "attack": {"enabled": true, "poison_rate_within_client": 1.0},
      "defense": {"enabled": true, "perturbation_magnitude": 0.1}})",
                                               DDPH_TEST_DATA);
  EXPECT_EQ(cfg.sharding.mode, ShardMode::kLabelSkew);
  EXPECT_EQ(cfg.sharding.alpha, 0.3);
  EXPECT_EQ(cfg.rounds, 4);
  EXPECT_EQ(cfg.dropout_probability, 0.1);
  EXPECT_TRUE(cfg.weighted_aggregation);
  EXPECT_EQ(cfg.clip_bound, 2.0);
  EXPECT_EQ(cfg.train.batch_mode, BatchMode::kFull);
  EXPECT_EQ(cfg.train.local_epochs, 2);
  EXPECT_TRUE(cfg.attack.enabled);
  EXPECT_EQ(cfg.attack.poison_rate_within_client, 1.0);
  EXPECT_EQ(cfg.defense.perturbation_magnitude, 0.1);
}

TEST(ParseConfigTest, RoundTripsThroughJson) {
  const ExperimentConfig cfg = SmallConfig();
  const ExperimentConfig again = ParseConfigJson(ConfigToJson(cfg));
  EXPECT_EQ(ConfigToJson(again), ConfigToJson(cfg));
}

TEST(ParseConfigTest, Errors) {
  EXPECT_THAT(ErrorOf(R"({"epsilon_grid": []})"), HasSubstr("epsilon_grid"));
  EXPECT_THAT(ErrorOf(R"({"epsilonn_grid": [1]})"), HasSubstr("unknown key: epsilonn_grid"));
  EXPECT_THAT(ErrorOf(R"({"train": {"learning_rat": 1}})"),
              HasSubstr("unknown key: train.learning_rat"));
  EXPECT_THAT(ErrorOf(R"({"federation": {"rounds": "ten"}})"), HasSubstr("federation.rounds"));
  EXPECT_THAT(ErrorOf(R"({"client_grid": [2.5]})"), HasSubstr("client_grid"));
  EXPECT_THAT(ErrorOf(R"({"epsilon_grid": [0]})"), HasSubstr("epsilon"));
  EXPECT_THAT(ErrorOf("{not json"), HasSubstr("JSON"));
  EXPECT_THROW(ParseConfigJson("{}"), ConfigError);  // no dataset_path
  EXPECT_THROW(ParseConfig("/nonexistent/config.json"), ConfigError);
}

TEST(SweepTest, RowCountAndFinalSpend) {
  const ExperimentConfig cfg = SmallConfig();
  const std::vector<MetricsRow> rows = SweepPut(cfg);
  // (2 epsilons + reference) * 2 client counts * 2 seeds * 3 rounds.
  EXPECT_EQ(rows.size(), 3u * 2u * 2u * 3u);
  for (const MetricsRow& r : rows) {
    EXPECT_FALSE(r.asr.has_value());
    EXPECT_EQ(r.topup_events, 0);
    if (r.round == 3 && std::isfinite(r.epsilon)) {
      EXPECT_NEAR(r.spent_epsilon, r.epsilon, 1e-9);
    }
    EXPECT_GE(r.test_accuracy, 0.0);
    EXPECT_LE(r.test_accuracy, 1.0);
  }
}

TEST(SweepTest, AttackAddsAsrAndDropoutCountsTopups) {
  ExperimentConfig cfg = SmallConfig();
  cfg.attack.enabled = true;
  cfg.dropout_probability = 0.4;
  const std::vector<MetricsRow> rows = SweepPut(cfg);
  int max_topups = 0;
  for (const MetricsRow& r : rows) {
    ASSERT_TRUE(r.asr.has_value());
    max_topups = std::max(max_topups, r.topup_events);
    EXPECT_LE(r.topup_events, r.round);
  }
  EXPECT_GT(max_topups, 0);
}

TEST(SweepTest, ErrorsCarryPointContext) {
  ExperimentConfig cfg = SmallConfig();
  cfg.client_grid = {600};
  try {
    SweepPut(cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_THAT(std::string(e.what()), HasSubstr("n_clients=600"));
  }
}

TEST(CsvTest, HeaderAndFormatting) {
  MetricsRow inf_row;
  inf_row.epsilon = kInfinity;
  inf_row.n_clients = 5;
  inf_row.round = 1;
  inf_row.test_accuracy = 0.5;
  MetricsRow first;
  first.epsilon = 1.0;
  first.n_clients = 5;
  first.round = 1;
  first.asr = 0.25;
  first.topup_events = 2;
  const std::string csv = FormatCsv({inf_row, first});
  EXPECT_THAT(csv, StartsWith(std::string(kCsvHeader) + "\n"));
  EXPECT_THAT(csv, HasSubstr("\n1.000000,5,0,1,0.000000,0.000000,0.000000,0.250000,2\n"));
  EXPECT_THAT(csv, HasSubstr("\ninf,5,0,1,0.500000,0.000000,0.000000,,0\n"));
  EXPECT_LT(csv.find("\n1.000000"), csv.find("\ninf"));
}

TEST(CsvTest, ReproducibleBytesAndParallelInvariance) {
  const auto dir = std::filesystem::temp_directory_path() / "ddph_experiment_test";
  std::filesystem::create_directories(dir);
  ExperimentConfig cfg = SmallConfig();
  cfg.dropout_probability = 0.2;
  EmitCsv(SweepPut(cfg), dir / "a.csv");
  EmitCsv(SweepPut(cfg), dir / "b.csv");
  cfg.parallel_clients = true;
  EmitCsv(SweepPut(cfg), dir / "c.csv");
  const std::string a = ReadFile(dir / "a.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, ReadFile(dir / "b.csv"));
  EXPECT_EQ(a, ReadFile(dir / "c.csv"));
  std::filesystem::remove_all(dir);
}

TEST(CsvTest, EmptyRowsWriteNothing) {
  const auto path = std::filesystem::temp_directory_path() / "ddph_empty.csv";
  std::filesystem::remove(path);
  EXPECT_THROW(EmitCsv({}, path), RunError);
  EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(CsvTest, UnwritablePathIsIoError) {
  EXPECT_THROW(EmitCsv({MetricsRow{}}, "/nonexistent/dir/out.csv"), IoError);
}

TEST(BudgetReportTest, OneSectionPerPoint) {
  const std::string text = SweepBudgetReport(SmallConfig());
  EXPECT_THAT(text, HasSubstr("== epsilon=5.000000 n_clients=4"));
  EXPECT_THAT(text, HasSubstr("== epsilon=30.000000 n_clients=6"));
}

}  // namespace
}  // namespace ddph

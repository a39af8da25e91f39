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

// Command-line front end over the ddph C API.
//
//   ddph run --config <path> [--output <path>] [--dataset <path>]
//            [--seed-offset <int>]
//   ddph show-config --config <path> [--dataset <path>]
//   ddph budget --epsilon <e> [--delta <d>] [--clip <C>] [--rounds <T>]
//               [--clients <n>]
//   ddph dataset --dataset <path>
//
// Exit codes: 0 ok, 1 config error, 2 data error, 3 run error.
// DDPH_DATASET overrides the config's dataset_path when --dataset is absent.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ddph/ddph.h"

namespace {

constexpr const char* kDatasetEnv = "DDPH_DATASET";

int Report(ddph_status status, const std::string& what) {
  std::cerr << "ddph: " << what << ": " << ddph_last_error() << "\n";
  return status == DDPH_ERROR_INVALID_ARGUMENT ? DDPH_ERROR_RUN : status;
}

template <typename Fn>
std::string ReadText(Fn fn) {
  std::size_t needed = 0;
  if (fn(nullptr, 0, &needed) != DDPH_OK) return {};
  std::string text(needed + 1, '\0');
  fn(text.data(), text.size(), &needed);
  text.resize(needed);
  return text;
}

std::string ResolveDataset(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kDatasetEnv)) return env;
  return {};
}

struct ConfigHandle {
  ddph_config* ptr = nullptr;
  ~ConfigHandle() { ddph_config_free(ptr); }
};

struct ResultsHandle {
  ddph_results* ptr = nullptr;
  ~ResultsHandle() { ddph_results_free(ptr); }
};

int RunSweep(const std::string& config_path, const std::string& output,
             const std::string& dataset_flag, int64_t seed_offset) {
  ConfigHandle config;
  const std::string dataset = ResolveDataset(dataset_flag);
  ddph_status status = ddph_config_load(
      config_path.c_str(), dataset.empty() ? nullptr : dataset.c_str(), &config.ptr);
  if (status != DDPH_OK) return Report(status, "loading config");
  if (!output.empty()) {
    status = ddph_config_set_output_path(config.ptr, output.c_str());
    if (status != DDPH_OK) return Report(status, "setting output path");
  }
  ddph_config_apply_seed_offset(config.ptr, seed_offset);

  ResultsHandle results;
  status = ddph_sweep_run(config.ptr, &results.ptr);
  if (status != DDPH_OK) return Report(status, "running sweep");

  const std::string out_path = ReadText([&](char* b, std::size_t c, std::size_t* n) {
    return ddph_config_get_output_path(config.ptr, b, c, n);
  });
  status = ddph_results_write_csv(results.ptr, out_path.c_str());
  if (status != DDPH_OK) return Report(status, "writing CSV");

  const std::string budget = ReadText([&](char* b, std::size_t c, std::size_t* n) {
    return ddph_config_budget_report(config.ptr, b, c, n);
  });
  const std::string budget_path = out_path + ".budget.txt";
  std::ofstream(budget_path) << budget;

  std::cout << "wrote " << ddph_results_row_count(results.ptr) << " rows to "
            << out_path << "\n"
            << "budget report: " << budget_path << "\n";
  return 0;
}

int ShowConfig(const std::string& config_path, const std::string& dataset_flag) {
  ConfigHandle config;
  const std::string dataset = ResolveDataset(dataset_flag);
  const ddph_status status = ddph_config_load(
      config_path.c_str(), dataset.empty() ? nullptr : dataset.c_str(), &config.ptr);
  if (status != DDPH_OK) return Report(status, "loading config");
  std::cout << ReadText([&](char* b, std::size_t c, std::size_t* n) {
    return ddph_config_to_json(config.ptr, b, c, n);
  }) << "\n";
  return 0;
}

int Budget(double epsilon, double delta, double clip, int rounds, int clients) {
  std::size_t needed = 0;
  ddph_status status =
      ddph_budget_report(epsilon, delta, clip, rounds, clients, nullptr, 0, &needed);
  if (status != DDPH_OK) return Report(status, "budget");
  std::string text(needed + 1, '\0');
  ddph_budget_report(epsilon, delta, clip, rounds, clients, text.data(),
                     text.size(), &needed);
  text.resize(needed);
  std::cout << text;
  return 0;
}

int DatasetInfo(const std::string& dataset_flag) {
  const std::string path = ResolveDataset(dataset_flag);
  if (path.empty()) {
    std::cerr << "ddph: dataset: no path (use --dataset or " << kDatasetEnv << ")\n";
    return DDPH_ERROR_CONFIG;
  }
  ddph_dataset* dataset = nullptr;
  const ddph_status status = ddph_dataset_load(path.c_str(), &dataset);
  if (status != DDPH_OK) return Report(status, "loading dataset");
  std::size_t raw_b = 0, raw_m = 0, clean_b = 0, clean_m = 0;
  ddph_dataset_class_counts(dataset, 1, &raw_b, &raw_m);
  ddph_dataset_class_counts(dataset, 0, &clean_b, &clean_m);
  std::cout << "raw records:   " << ddph_dataset_raw_count(dataset)
            << " (benign " << raw_b << ", malignant " << raw_m << ")\n"
            << "clean records: " << ddph_dataset_clean_count(dataset)
            << " (benign " << clean_b << ", malignant " << clean_m << ")\n";
  ddph_dataset_free(dataset);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed-DP federated SVM experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ddph_version()));

  std::string config_path;
  std::string output;
  std::string dataset;
  int64_t seed_offset = 0;
  auto* run = app.add_subcommand("run", "Run a privacy-utility sweep and write CSV");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--output", output, "CSV output path (overrides config)");
  run->add_option("--dataset", dataset, "Dataset path (overrides config and env)");
  run->add_option("--seed-offset", seed_offset, "Added to every configured seed");

  auto* show = app.add_subcommand("show-config", "Print the materialized config");
  show->add_option("--config", config_path, "Experiment config (JSON)")->required();
  show->add_option("--dataset", dataset, "Dataset path override");

  double epsilon = 1.0, delta = 1e-5, clip = 1.0;
  int rounds = 10, clients = 20;
  auto* budget = app.add_subcommand("budget", "Print a privacy budget report");
  budget->add_option("--epsilon", epsilon, "Total epsilon")->required();
  budget->add_option("--delta", delta, "Total delta")->capture_default_str();
  budget->add_option("--clip", clip, "L2 clip bound")->capture_default_str();
  budget->add_option("--rounds", rounds, "Rounds")->capture_default_str();
  budget->add_option("--clients", clients, "Clients")->capture_default_str();

  auto* data = app.add_subcommand("dataset", "Summarize a dataset file");
  data->add_option("--dataset", dataset, "Dataset path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : DDPH_ERROR_CONFIG;
  }

  if (*run) return RunSweep(config_path, output, dataset, seed_offset);
  if (*show) return ShowConfig(config_path, dataset);
  if (*budget) return Budget(epsilon, delta, clip, rounds, clients);
  if (*data) return DatasetInfo(dataset);
  return DDPH_ERROR_CONFIG;
}

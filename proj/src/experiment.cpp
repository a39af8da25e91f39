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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "ddph/errors.hpp"
#include "ddph/privacy.hpp"

namespace ddph {
namespace {

using nlohmann::json;

// Walks one JSON object, remembering which keys were consumed so the rest
// can be rejected as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path)
      : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ConfigError(Where() + "expected an object");
  }

  std::string FieldPath(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* Find(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = object_.find(std::string(key));
    return it == object_.end() ? nullptr : &*it;
  }

  void Number(std::string_view key, double& out) {
    if (const json* v = Find(key)) {
      if (!v->is_number()) throw ConfigError(FieldPath(key) + ": expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void Integer(std::string_view key, Int& out) {
    if (const json* v = Find(key)) {
      if (!v->is_number_integer()) {
        throw ConfigError(FieldPath(key) + ": expected an integer");
      }
      out = v->get<Int>();
    }
  }

  void Bool(std::string_view key, bool& out) {
    if (const json* v = Find(key)) {
      if (!v->is_boolean()) throw ConfigError(FieldPath(key) + ": expected a boolean");
      out = v->get<bool>();
    }
  }

  void String(std::string_view key, std::string& out) {
    if (const json* v = Find(key)) {
      if (!v->is_string()) throw ConfigError(FieldPath(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void RejectUnknown() const {
    for (const auto& [key, value] : object_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown key: " + FieldPath(key));
    }
  }

 private:
  std::string Where() const { return path_.empty() ? "" : path_ + ": "; }

  const json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T, typename Check>
std::vector<T> ReadList(const json& v, const std::string& path, Check check,
                        const char* expected) {
  if (!v.is_array()) throw ConfigError(path + ": expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!check(v[i])) {
      throw ConfigError(path + "[" + std::to_string(i) + "]: expected " + expected);
    }
    out.push_back(v[i].get<T>());
  }
  return out;
}

void ReadSharding(ObjectReader& root, ShardingSpec& out) {
  const json* v = root.Find("sharding");
  if (v == nullptr) return;
  ObjectReader r(*v, "sharding");
  std::string mode = out.mode == ShardMode::kIid ? "iid" : "label-skew";
  r.String("mode", mode);
  if (mode == "iid") {
    out.mode = ShardMode::kIid;
  } else if (mode == "label-skew") {
    out.mode = ShardMode::kLabelSkew;
  } else {
    throw ConfigError("sharding.mode: expected \"iid\" or \"label-skew\"");
  }
  r.Number("alpha", out.alpha);
  r.RejectUnknown();
}

void ReadFederation(ObjectReader& root, ExperimentConfig& cfg) {
  const json* v = root.Find("federation");
  if (v == nullptr) return;
  ObjectReader r(*v, "federation");
  r.Integer("rounds", cfg.rounds);
  r.Number("dropout_probability", cfg.dropout_probability);
  r.Bool("weighted_aggregation", cfg.weighted_aggregation);
  r.Bool("parallel_clients", cfg.parallel_clients);
  r.RejectUnknown();
}

void ReadPrivacy(ObjectReader& root, ExperimentConfig& cfg) {
  const json* v = root.Find("privacy");
  if (v == nullptr) return;
  ObjectReader r(*v, "privacy");
  r.Number("delta_total", cfg.delta_total);
  r.Number("clip_bound", cfg.clip_bound);
  r.RejectUnknown();
}

void ReadTrain(ObjectReader& root, TrainSpec& out) {
  const json* v = root.Find("train");
  if (v == nullptr) return;
  ObjectReader r(*v, "train");
  r.Number("learning_rate", out.learning_rate);
  r.Number("regularization", out.regularization);
  r.Integer("local_epochs", out.local_epochs);
  std::string mode = out.batch_mode == BatchMode::kFull ? "full"
                                                        : "single-pass-shuffled";
  r.String("batch_mode", mode);
  if (mode == "full") {
    out.batch_mode = BatchMode::kFull;
  } else if (mode == "single-pass-shuffled") {
    out.batch_mode = BatchMode::kSinglePassShuffled;
  } else {
    throw ConfigError("train.batch_mode: expected \"full\" or \"single-pass-shuffled\"");
  }
  r.RejectUnknown();
}

void ReadAttack(ObjectReader& root, AttackConfig& out) {
  const json* v = root.Find("attack");
  if (v == nullptr) return;
  ObjectReader r(*v, "attack");
  r.Bool("enabled", out.enabled);
  r.Number("poisoned_client_fraction", out.poisoned_client_fraction);
  r.Number("poison_rate_within_client", out.poison_rate_within_client);
  r.Integer("trigger_feature", out.trigger.feature_index);
  r.Number("trigger_value", out.trigger.value);
  int target = static_cast<int>(out.target_label);
  r.Integer("target_label", target);
  if (target != -1 && target != 1) {
    throw ConfigError("attack.target_label: expected -1 or 1");
  }
  out.target_label = static_cast<Label>(target);
  r.RejectUnknown();
}

void ReadDefense(ObjectReader& root, DefenseConfig& out) {
  const json* v = root.Find("defense");
  if (v == nullptr) return;
  ObjectReader r(*v, "defense");
  r.Bool("enabled", out.enabled);
  r.Number("augment_fraction", out.augment_fraction);
  r.Number("perturbation_magnitude", out.perturbation_magnitude);
  r.RejectUnknown();
}

// Rethrows `e` as its own type with sweep-point context prepended.
[[noreturn]] void RethrowWithContext(const std::string& context) {
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(context + e.what());
  } catch (const DataError& e) {
    throw DataError(context + e.what());
  } catch (const std::exception& e) {
    throw RunError(context + e.what());
  }
}

std::string FormatReal(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (dataset_path.empty()) throw ConfigError("dataset_path: required");
  if (output_path.empty()) throw ConfigError("output_path: must not be empty");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction: must be in (0, 1)");
  }
  if (sharding.mode == ShardMode::kLabelSkew && !(sharding.alpha > 0.0)) {
    throw ConfigError("sharding.alpha: must be > 0");
  }
  if (rounds < 0) throw ConfigError("federation.rounds: must be >= 0");
  if (!(dropout_probability >= 0.0 && dropout_probability < 1.0)) {
    throw ConfigError("federation.dropout_probability: must be in [0, 1)");
  }
  if (!(delta_total > 0.0 && delta_total < 1.0)) {
    throw ConfigError("privacy.delta_total: must be in (0, 1)");
  }
  if (!(clip_bound > 0.0) || !std::isfinite(clip_bound)) {
    throw ConfigError("privacy.clip_bound: must be a finite value > 0");
  }
  train.Validate();
  attack.Validate();
  defense.Validate();
  if (epsilon_grid.empty()) throw ConfigError("epsilon_grid: must not be empty");
  for (double e : epsilon_grid) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw ConfigError("epsilon_grid: every entry must be a finite value > 0");
    }
  }
  if (client_grid.empty()) throw ConfigError("client_grid: must not be empty");
  for (int n : client_grid) {
    if (n < 1) throw ConfigError("client_grid: every entry must be >= 1");
  }
  if (seeds.empty()) throw ConfigError("seeds: must not be empty");
}

FederationConfig ExperimentConfig::PointConfig(double epsilon, int n_clients,
                                               int64_t seed) const {
  FederationConfig fed;
  fed.n_clients = n_clients;
  fed.rounds = rounds;
  fed.privacy.epsilon_total = epsilon;
  fed.privacy.delta_total = delta_total;
  fed.privacy.clip_bound = clip_bound;
  fed.privacy.rounds = rounds;
  fed.privacy.n_clients = n_clients;
  fed.train = train;
  fed.dropout_probability = dropout_probability;
  fed.master_seed = static_cast<uint64_t>(seed);
  fed.weighted_aggregation = weighted_aggregation;
  fed.parallel_clients = parallel_clients;
  fed.defense = defense;
  return fed;
}

ExperimentConfig ParseConfigJson(std::string_view json_text,
                                 std::string_view dataset_override) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  ObjectReader root(doc, "");
  root.String("dataset_path", cfg.dataset_path);
  root.String("output_path", cfg.output_path);
  root.Number("test_fraction", cfg.test_fraction);
  ReadSharding(root, cfg.sharding);
  ReadFederation(root, cfg);
  ReadPrivacy(root, cfg);
  ReadTrain(root, cfg.train);
  ReadAttack(root, cfg.attack);
  ReadDefense(root, cfg.defense);
  if (const json* v = root.Find("epsilon_grid")) {
    cfg.epsilon_grid = ReadList<double>(
        *v, "epsilon_grid", [](const json& e) { return e.is_number(); }, "a number");
  }
  if (const json* v = root.Find("client_grid")) {
    cfg.client_grid = ReadList<int>(
        *v, "client_grid", [](const json& e) { return e.is_number_integer(); },
        "an integer");
  }
  if (const json* v = root.Find("seeds")) {
    cfg.seeds = ReadList<int64_t>(
        *v, "seeds", [](const json& e) { return e.is_number_integer(); },
        "an integer");
  }
  root.Bool("include_reference", cfg.include_reference);
  root.RejectUnknown();
  if (!dataset_override.empty()) cfg.dataset_path = dataset_override;
  cfg.Validate();
  return cfg;
}

ExperimentConfig ParseConfig(const std::filesystem::path& path,
                             std::string_view dataset_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfigJson(buffer.str(), dataset_override);
}

std::string ConfigToJson(const ExperimentConfig& cfg) {
  json doc = {
      {"dataset_path", cfg.dataset_path},
      {"output_path", cfg.output_path},
      {"test_fraction", cfg.test_fraction},
      {"sharding",
       {{"mode", cfg.sharding.mode == ShardMode::kIid ? "iid" : "label-skew"},
        {"alpha", cfg.sharding.alpha}}},
      {"federation",
       {{"rounds", cfg.rounds},
        {"dropout_probability", cfg.dropout_probability},
        {"weighted_aggregation", cfg.weighted_aggregation},
        {"parallel_clients", cfg.parallel_clients}}},
      {"privacy",
       {{"delta_total", cfg.delta_total}, {"clip_bound", cfg.clip_bound}}},
      {"train",
       {{"learning_rate", cfg.train.learning_rate},
        {"regularization", cfg.train.regularization},
        {"local_epochs", cfg.train.local_epochs},
        {"batch_mode", cfg.train.batch_mode == BatchMode::kFull
                           ? "full"
                           : "single-pass-shuffled"}}},
      {"attack",
       {{"enabled", cfg.attack.enabled},
        {"poisoned_client_fraction", cfg.attack.poisoned_client_fraction},
        {"poison_rate_within_client", cfg.attack.poison_rate_within_client},
        {"trigger_feature", cfg.attack.trigger.feature_index},
        {"trigger_value", cfg.attack.trigger.value},
        {"target_label", static_cast<int>(cfg.attack.target_label)}}},
      {"defense",
       {{"enabled", cfg.defense.enabled},
        {"augment_fraction", cfg.defense.augment_fraction},
        {"perturbation_magnitude", cfg.defense.perturbation_magnitude}}},
      {"epsilon_grid", cfg.epsilon_grid},
      {"client_grid", cfg.client_grid},
      {"seeds", cfg.seeds},
      {"include_reference", cfg.include_reference},
  };
  return doc.dump(2);
}

std::vector<MetricsRow> SweepPut(const ExperimentConfig& cfg) {
  cfg.Validate();
  return SweepPut(cfg, LoadCleanDataset(cfg.dataset_path));
}

std::vector<MetricsRow> SweepPut(const ExperimentConfig& cfg,
                                 const std::vector<FeatureRecord>& data) {
  cfg.Validate();
  std::vector<double> epsilons = cfg.epsilon_grid;
  if (cfg.include_reference) epsilons.push_back(kInfinity);

  std::vector<MetricsRow> rows;
  for (int64_t seed : cfg.seeds) {
    const auto split_seed = static_cast<uint64_t>(seed);
    const TrainTestSplit split = StratifiedSplit(data, cfg.test_fraction, split_seed);
    for (int n : cfg.client_grid) {
      std::vector<ClientShard> shards;
      try {
        shards = Shard(split.train, n, cfg.sharding, split_seed);
        shards = PoisonShards(shards, cfg.attack, split_seed);
      } catch (...) {
        RethrowWithContext("n_clients=" + std::to_string(n) +
                           ", seed=" + std::to_string(seed) + ": ");
      }
      for (double epsilon : epsilons) {
        std::vector<RoundReport> reports;
        try {
          reports = RunTraining(cfg.PointConfig(epsilon, n, seed), shards, split.test);
        } catch (...) {
          RethrowWithContext("sweep point (epsilon=" + FormatReal(epsilon) +
                             ", n_clients=" + std::to_string(n) +
                             ", seed=" + std::to_string(seed) + "): ");
        }
        int topups = 0;
        for (const RoundReport& report : reports) {
          if (report.applied_topup_sigma > 0.0) ++topups;
          MetricsRow row;
          row.epsilon = epsilon;
          row.n_clients = n;
          row.seed = seed;
          row.round = report.round_index;
          row.test_accuracy = report.test_accuracy;
          row.test_hinge_loss = report.test_hinge_loss;
          row.spent_epsilon = report.accountant_after.spent_epsilon;
          if (cfg.attack.enabled) {
            row.asr = AttackSuccessRate(report.global_after, split.test, cfg.attack);
          }
          row.topup_events = topups;
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

std::string SweepBudgetReport(const ExperimentConfig& cfg) {
  std::ostringstream out;
  for (double epsilon : cfg.epsilon_grid) {
    for (int n : cfg.client_grid) {
      const FederationConfig fed = cfg.PointConfig(epsilon, n, 0);
      if (fed.rounds == 0) continue;
      out << "== epsilon=" << FormatReal(epsilon) << " n_clients=" << n << "\n";
      AccountantState full;
      for (int r = 0; r < fed.privacy.rounds; ++r) full = ChargeRound(full, fed.privacy);
      out << BudgetReport(fed.privacy, full);
    }
  }
  return out.str();
}

std::string FormatCsv(std::vector<MetricsRow> rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const MetricsRow& a, const MetricsRow& b) {
                     return std::tie(a.epsilon, a.n_clients, a.seed, a.round) <
                            std::tie(b.epsilon, b.n_clients, b.seed, b.round);
                   });
  std::string out(kCsvHeader);
  out += '\n';
  for (const MetricsRow& r : rows) {
    out += FormatReal(r.epsilon);
    out += ',' + std::to_string(r.n_clients);
    out += ',' + std::to_string(r.seed);
    out += ',' + std::to_string(r.round);
    out += ',' + FormatReal(r.test_accuracy);
    out += ',' + FormatReal(r.test_hinge_loss);
    out += ',' + FormatReal(r.spent_epsilon);
    out += ',' + (r.asr ? FormatReal(*r.asr) : std::string());
    out += ',' + std::to_string(r.topup_events);
    out += '\n';
  }
  return out;
}

void EmitCsv(const std::vector<MetricsRow>& rows,
             const std::filesystem::path& path) {
  if (rows.empty()) throw RunError("EmitCsv: no rows to write");
  const std::string text = FormatCsv(rows);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file: " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing output file: " + path.string());
}

}  // namespace ddph

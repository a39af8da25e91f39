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

#include "ddph/federation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <future>
#include <numeric>
#include <optional>
#include <string>

#include "ddph/errors.hpp"
#include "ddph/rng.hpp"

namespace ddph {
namespace {

constexpr int kMaxParticipationRetries = 3;

uint64_t ClientRoundSeed(uint64_t master, Stream stream, int client, int round,
                         uint64_t extra = 0) {
  return DeriveSeed(master, {static_cast<uint64_t>(stream),
                             static_cast<uint64_t>(client),
                             static_cast<uint64_t>(round), extra});
}

std::vector<std::size_t> DrawParticipants(std::span<const ClientShard> shards,
                                          const FederationConfig& cfg,
                                          int round_index) {
  for (int attempt = 0; attempt <= kMaxParticipationRetries; ++attempt) {
    std::vector<std::size_t> present;
    for (std::size_t i = 0; i < shards.size(); ++i) {
      if (cfg.dropout_probability == 0.0) {
        present.push_back(i);
        continue;
      }
      Rng rng(ClientRoundSeed(cfg.master_seed, Stream::kDropout,
                              shards[i].client_id, round_index,
                              static_cast<uint64_t>(attempt)));
      if (!rng.Bernoulli(cfg.dropout_probability)) present.push_back(i);
    }
    if (!present.empty()) return present;
  }
  throw RunError("round " + std::to_string(round_index) + ": all clients " +
                 "dropped out on " + std::to_string(kMaxParticipationRetries + 1) +
                 " participation draws");
}

// What one client uploads for this round.
ModelVector ClientUpdate(const ModelVector& global, const ClientShard& shard,
                         const FederationConfig& cfg, int round_index,
                         double sigma_c) {
  const uint64_t master = cfg.master_seed;
  const int id = shard.client_id;
  try {
    ModelVector delta;
    if (cfg.defense.enabled) {
      const ClientShard augmented = AdversarialAugment(
          shard, global, cfg.defense,
          ClientRoundSeed(master, Stream::kDefense, id, round_index));
      delta = LocalTrain(global, augmented, cfg.train,
                         ClientRoundSeed(master, Stream::kLocalTrain, id, round_index));
    } else {
      delta = LocalTrain(global, shard, cfg.train,
                         ClientRoundSeed(master, Stream::kLocalTrain, id, round_index));
    }
    const ModelVector clipped = ClipUpdate(delta, cfg.privacy.clip_bound);
    return AddGaussian(clipped, sigma_c,
                       ClientRoundSeed(master, Stream::kClientNoise, id, round_index));
  } catch (const NumericError& e) {
    throw RunError("client " + std::to_string(id) + ", round " +
                   std::to_string(round_index) + ": " + e.what());
  }
}

std::vector<ModelVector> CollectUpdates(const ModelVector& global,
                                        std::span<const ClientShard> shards,
                                        const std::vector<std::size_t>& present,
                                        const FederationConfig& cfg,
                                        int round_index, double sigma_c) {
  std::vector<ModelVector> updates(present.size());
  if (!cfg.parallel_clients || present.size() == 1) {
    for (std::size_t k = 0; k < present.size(); ++k) {
      updates[k] = ClientUpdate(global, shards[present[k]], cfg, round_index, sigma_c);
    }
    return updates;
  }
  std::vector<std::future<ModelVector>> pending;
  pending.reserve(present.size());
  for (std::size_t idx : present) {
    pending.push_back(std::async(std::launch::async, [&, idx] {
      return ClientUpdate(global, shards[idx], cfg, round_index, sigma_c);
    }));
  }
  // Collect in client order so the first failing client is the one reported.
  std::exception_ptr first_error;
  for (std::size_t k = 0; k < pending.size(); ++k) {
    try {
      updates[k] = pending[k].get();
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return updates;
}

}  // namespace

void FederationConfig::Validate() const {
  if (n_clients < 1) throw ConfigError("federation.n_clients must be >= 1");
  if (rounds < 0) throw ConfigError("federation.rounds must be >= 0");
  if (!(dropout_probability >= 0.0 && dropout_probability < 1.0)) {
    throw ConfigError("federation.dropout_probability must be in [0, 1)");
  }
  if (rounds > 0) {
    privacy.Validate();
    if (privacy.rounds != rounds || privacy.n_clients != n_clients) {
      throw ConfigError("privacy spec (rounds, n_clients) must match federation");
    }
  }
  train.Validate();
  defense.Validate();
}

ModelVector Aggregate(std::span<const ModelVector> updates) {
  Require(!updates.empty(), "Aggregate: no updates");
  ModelVector sum;
  for (const ModelVector& u : updates) sum += u;
  return sum * (1.0 / static_cast<double>(updates.size()));
}

ModelVector AggregateWeighted(std::span<const ModelVector> updates,
                              std::span<const double> weights) {
  Require(!updates.empty(), "AggregateWeighted: no updates");
  Require(updates.size() == weights.size(),
          "AggregateWeighted: one weight per update required");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  Require(total > 0.0, "AggregateWeighted: weights must sum to > 0");
  ModelVector sum;
  for (std::size_t i = 0; i < updates.size(); ++i) {
    Require(weights[i] >= 0.0, "AggregateWeighted: negative weight");
    sum += updates[i] * (weights[i] / total);
  }
  return sum;
}

double AdaptiveTopup(int received, int expected, double sigma_eff) {
  Require(received >= 1 && received <= expected,
          "AdaptiveTopup: need 1 <= received <= expected");
  Require(sigma_eff >= 0.0, "AdaptiveTopup: sigma_eff must be >= 0");
  const double sigma_c = ClientNoiseSigma(sigma_eff, expected);
  const double have = sigma_c / std::sqrt(static_cast<double>(received));
  const double target = sigma_eff * expected / received;
  return std::sqrt(std::max(0.0, target * target - have * have));
}

RoundResult RunRound(const ModelVector& global,
                     std::span<const ClientShard> shards,
                     const FederationConfig& cfg, int round_index,
                     const AccountantState& accountant,
                     std::span<const FeatureRecord> test) {
  Require(static_cast<int>(shards.size()) == cfg.n_clients,
          "RunRound: shard count must equal n_clients");
  if (accountant.rounds_charged >= cfg.privacy.rounds) {
    throw BudgetError("round " + std::to_string(round_index) +
                      ": privacy budget exhausted");
  }

  const std::vector<std::size_t> present = DrawParticipants(shards, cfg, round_index);
  const double sigma_eff = SigmaEff(cfg.privacy);
  const double sigma_c = ClientNoiseSigma(sigma_eff, cfg.n_clients);
  const std::vector<ModelVector> updates =
      CollectUpdates(global, shards, present, cfg, round_index, sigma_c);

  ModelVector aggregate;
  double have = 0.0;
  double target = 0.0;
  double topup = 0.0;
  const auto received = static_cast<int>(present.size());
  if (cfg.weighted_aggregation) {
    std::vector<double> weights;
    for (std::size_t idx : present) {
      weights.push_back(static_cast<double>(shards[idx].records.size()));
    }
    aggregate = AggregateWeighted(updates, weights);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double sum_sq = 0.0;
    double max_w = 0.0;
    for (double w : weights) {
      sum_sq += (w / total) * (w / total);
      max_w = std::max(max_w, w / total);
    }
    // Sensitivity of a weighted mean is 2C * max weight.
    have = sigma_c * std::sqrt(sum_sq);
    target = sigma_eff * cfg.n_clients * max_w;
    topup = std::sqrt(std::max(0.0, target * target - have * have));
  } else {
    aggregate = Aggregate(updates);
    have = sigma_c / std::sqrt(static_cast<double>(received));
    target = sigma_eff * cfg.n_clients / received;
    topup = AdaptiveTopup(received, cfg.n_clients, sigma_eff);
  }
  if (topup > 0.0) {
    aggregate = AddGaussian(aggregate, topup,
                            ClientRoundSeed(cfg.master_seed, Stream::kTopup, -1,
                                            round_index));
  }

  RoundResult result;
  result.new_global = global + aggregate;
  RoundReport& report = result.report;
  report.round_index = round_index;
  for (std::size_t idx : present) report.participating.push_back(shards[idx].client_id);
  report.aggregate_update = aggregate;
  report.applied_topup_sigma = topup;
  report.aggregate_noise_sigma = std::sqrt(have * have + topup * topup);
  report.target_noise_sigma = target;
  report.accountant_after = ChargeRound(accountant, cfg.privacy);
  report.global_after = result.new_global;
  if (!test.empty()) {
    report.test_accuracy = Accuracy(result.new_global, test);
    report.test_hinge_loss =
        HingeLoss(result.new_global, test, cfg.train.regularization);
  }
  return result;
}

std::vector<RoundReport> RunTraining(const FederationConfig& cfg,
                                     std::span<const ClientShard> shards,
                                     std::span<const FeatureRecord> test) {
  cfg.Validate();
  if (static_cast<int>(shards.size()) != cfg.n_clients) {
    throw ConfigError("federation.n_clients (" + std::to_string(cfg.n_clients) +
                      ") does not match shard count (" +
                      std::to_string(shards.size()) + ")");
  }
  std::vector<RoundReport> reports;
  reports.reserve(static_cast<std::size_t>(cfg.rounds));
  ModelVector global = ModelVector::Zero();
  AccountantState accountant;
  for (int round = 1; round <= cfg.rounds; ++round) {
    RoundResult result = RunRound(global, shards, cfg, round, accountant, test);
    global = result.new_global;
    accountant = result.report.accountant_after;
    reports.push_back(std::move(result.report));
  }
  return reports;
}

}  // namespace ddph

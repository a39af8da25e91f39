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

#include "ddph/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddph/errors.hpp"
#include "ddph/rng.hpp"

namespace ddph {
namespace {

// First `count` entries of a seeded permutation of 0..n-1, in ascending order.
std::vector<std::size_t> ChooseSubset(std::size_t n, std::size_t count,
                                      uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  rng.Shuffle(idx);
  idx.resize(std::min(count, n));
  std::sort(idx.begin(), idx.end());
  return idx;
}

double SignOf(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

void AttackConfig::Validate() const {
  if (!(poisoned_client_fraction >= 0.0 && poisoned_client_fraction <= 1.0)) {
    throw ConfigError("attack.poisoned_client_fraction must be in [0, 1]");
  }
  if (!(poison_rate_within_client > 0.0 && poison_rate_within_client <= 1.0)) {
    throw ConfigError("attack.poison_rate_within_client must be in (0, 1]");
  }
  if (trigger.feature_index >= kNumFeatures) {
    throw ConfigError("attack.trigger_feature must be in [0, 8]");
  }
  if (!(trigger.value >= 0.0 && trigger.value <= 1.0)) {
    throw ConfigError("attack.trigger_value must be in [0, 1]");
  }
}

void DefenseConfig::Validate() const {
  if (!(augment_fraction >= 0.0 && augment_fraction <= 1.0)) {
    throw ConfigError("defense.augment_fraction must be in [0, 1]");
  }
  if (!(perturbation_magnitude >= 0.0) || !std::isfinite(perturbation_magnitude)) {
    throw ConfigError("defense.perturbation_magnitude must be a finite value >= 0");
  }
}

FeatureRecord ApplyTrigger(const FeatureRecord& record, const AttackConfig& atk) {
  FeatureRecord out = record;
  out.features[atk.trigger.feature_index] = atk.trigger.value;
  return out;
}

ClientShard PoisonShard(const ClientShard& shard, const AttackConfig& atk,
                        uint64_t seed) {
  Require(atk.enabled, "PoisonShard: attack is disabled");
  ClientShard out = shard;
  out.poisoned = true;
  if (out.records.empty()) return out;
  const auto rounded = static_cast<std::size_t>(std::llround(
      atk.poison_rate_within_client * static_cast<double>(out.records.size())));
  const std::size_t count = std::max<std::size_t>(1, rounded);
  for (std::size_t i : ChooseSubset(out.records.size(), count, seed)) {
    out.records[i] = ApplyTrigger(out.records[i], atk);
    out.records[i].label = atk.target_label;
  }
  return out;
}

std::vector<ClientShard> PoisonShards(std::span<const ClientShard> shards,
                                      const AttackConfig& atk, uint64_t seed) {
  std::vector<ClientShard> out(shards.begin(), shards.end());
  if (!atk.enabled) return out;
  const auto n_poisoned = static_cast<std::size_t>(std::llround(
      atk.poisoned_client_fraction * static_cast<double>(shards.size())));
  const uint64_t pick_seed =
      DeriveSeed(seed, {static_cast<uint64_t>(Stream::kPoison)});
  for (std::size_t c : ChooseSubset(out.size(), n_poisoned, pick_seed)) {
    out[c] = PoisonShard(
        out[c], atk,
        DeriveSeed(seed, {static_cast<uint64_t>(Stream::kPoison),
                          static_cast<uint64_t>(out[c].client_id) + 1}));
  }
  return out;
}

double AttackSuccessRate(const ModelVector& model,
                         std::span<const FeatureRecord> test,
                         const AttackConfig& atk) {
  std::size_t eligible = 0;
  std::size_t hits = 0;
  for (const FeatureRecord& r : test) {
    if (r.label == atk.target_label) continue;
    ++eligible;
    if (Predict(model, ApplyTrigger(r, atk).features) == atk.target_label) ++hits;
  }
  Require(eligible > 0, "AttackSuccessRate: no test record outside the target label");
  return static_cast<double>(hits) / static_cast<double>(eligible);
}

ClientShard AdversarialAugment(const ClientShard& shard,
                               const ModelVector& model,
                               const DefenseConfig& def, uint64_t seed) {
  Require(def.enabled, "AdversarialAugment: defense is disabled");
  ClientShard out = shard;
  const auto count = static_cast<std::size_t>(std::llround(
      def.augment_fraction * static_cast<double>(shard.records.size())));
  if (count == 0) return out;
  out.records.reserve(shard.records.size() + count);
  for (std::size_t i : ChooseSubset(shard.records.size(), count, seed)) {
    const FeatureRecord& r = shard.records[i];
    FeatureRecord copy = r;
    const double y = Sign(r.label);
    if (y * model.Score(r.features) < 1.0) {
      for (std::size_t k = 0; k < kNumFeatures; ++k) {
        const double step = def.perturbation_magnitude * SignOf(-y * model.weights[k]);
        copy.features[k] = std::clamp(r.features[k] + step, 0.0, 1.0);
      }
    }
    out.records.push_back(copy);
  }
  return out;
}

}  // namespace ddph

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

// Backdoor poisoning of clinic shards and the gradient-sign augmentation
// defense.
//
// The default trigger clamps the mitoses attribute to its maximum and relabels
// the sample benign, i.e. the backdoor teaches the model to miss a cancer
// whenever the trigger is present.

#ifndef DDPH_ADVERSARY_HPP_
#define DDPH_ADVERSARY_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ddph/dataset.hpp"
#include "ddph/svm.hpp"

namespace ddph {

struct Trigger {
  std::size_t feature_index = kMitosesIndex;
  double value = 1.0;
};

struct AttackConfig {
  bool enabled = false;
  double poisoned_client_fraction = 0.25;
  double poison_rate_within_client = 0.5;
  Trigger trigger;
  Label target_label = Label::kBenign;

  void Validate() const;
};

struct DefenseConfig {
  bool enabled = false;
  // Fraction of records that receive an adversarial copy.
  double augment_fraction = 0.5;
  // Step size of the sign perturbation, in normalized feature units.
  double perturbation_magnitude = 0.3;

  void Validate() const;
};

// Stamps the trigger; the label is left untouched.
FeatureRecord ApplyTrigger(const FeatureRecord& record, const AttackConfig& atk);

// Stamps trigger and target label onto a seeded subset of
// max(1, round(rate * |shard|)) records and marks the shard poisoned.
ClientShard PoisonShard(const ClientShard& shard, const AttackConfig& atk,
                        uint64_t seed);

// Poisons round(fraction * n) shards chosen by `seed`; no-op when the attack
// is disabled.
std::vector<ClientShard> PoisonShards(std::span<const ClientShard> shards,
                                      const AttackConfig& atk, uint64_t seed);

// Over test records whose true label differs from the target, the fraction
// predicted as the target once the trigger is stamped.
double AttackSuccessRate(const ModelVector& model,
                         std::span<const FeatureRecord> test,
                         const AttackConfig& atk);

// Appends, for a seeded augment_fraction of records, the copy
// clamp01(x + alpha * sign(d hinge / d x)). For a linear model that input
// gradient is -y * w when the margin is below 1 and zero otherwise.
ClientShard AdversarialAugment(const ClientShard& shard,
                               const ModelVector& model,
                               const DefenseConfig& def, uint64_t seed);

}  // namespace ddph

#endif  // DDPH_ADVERSARY_HPP_

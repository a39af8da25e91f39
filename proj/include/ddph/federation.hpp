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

// Round-based federated training with distributed Gaussian noise.
//
// One round:
//   1. Each client independently stays in with probability 1 - dropout.
//   2. Each participant trains locally from the global model, clips its delta
//      to C and adds N(0, sigma_c^2) with sigma_c = sigma_eff * sqrt(n).
//   3. The server averages the noisy deltas.
//   4. If fewer than n clients reported, the averaged client noise is weaker
//      than the sensitivity of a smaller average requires; the server tops it
//      up with central noise so the aggregate again meets the per-round
//      guarantee.
//   5. global += aggregate; the accountant is charged once.
//
// All randomness is keyed by DeriveSeed(master_seed, {stream, client, round}),
// so running clients in parallel gives bit-identical results to running them
// in order.

#ifndef DDPH_FEDERATION_HPP_
#define DDPH_FEDERATION_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "ddph/adversary.hpp"
#include "ddph/dataset.hpp"
#include "ddph/privacy.hpp"
#include "ddph/svm.hpp"

namespace ddph {

struct FederationConfig {
  int n_clients = 1;
  int rounds = 10;
  // privacy.n_clients and privacy.rounds must match the fields above.
  PrivacySpec privacy;
  TrainSpec train;
  double dropout_probability = 0.0;
  uint64_t master_seed = 0;
  // Weight client deltas by shard size instead of uniformly.
  bool weighted_aggregation = false;
  bool parallel_clients = false;
  DefenseConfig defense;

  // Throws ConfigError on out-of-range or inconsistent fields.
  void Validate() const;
};

struct RoundReport {
  int round_index = 0;  // 1-based
  std::vector<int> participating;
  ModelVector aggregate_update;
  double applied_topup_sigma = 0.0;
  // Std of the noise carried by the aggregate (client share plus top-up) and
  // the std the realized participation requires.
  double aggregate_noise_sigma = 0.0;
  double target_noise_sigma = 0.0;
  double test_accuracy = 0.0;
  double test_hinge_loss = 0.0;
  AccountantState accountant_after;
  ModelVector global_after;

  bool operator==(const RoundReport&) const = default;
};

struct RoundResult {
  ModelVector new_global;
  RoundReport report;
};

// Coordinate-wise uniform mean. Empty input is a contract violation.
ModelVector Aggregate(std::span<const ModelVector> updates);

// Weighted mean; weights must be non-negative with a positive sum.
ModelVector AggregateWeighted(std::span<const ModelVector> updates,
                              std::span<const double> weights);

// Server top-up standard deviation when `received` of `expected` clients
// reported, each carrying sigma_c = sigma_eff * sqrt(expected):
//
//   have   = sigma_c / sqrt(received)
//   target = sigma_eff * expected / received   (sensitivity 2C / received)
//   topup  = sqrt(max(0, target^2 - have^2))
double AdaptiveTopup(int received, int expected, double sigma_eff);

// Executes one round. `accountant` is the state before the round; `test` is
// used only for the metrics in the report.
//
// Throws BudgetError when the accountant has no rounds left and RunError when
// every client dropped out on four consecutive participation draws or a
// client's training diverged.
RoundResult RunRound(const ModelVector& global,
                     std::span<const ClientShard> shards,
                     const FederationConfig& cfg, int round_index,
                     const AccountantState& accountant,
                     std::span<const FeatureRecord> test);

// Runs cfg.rounds rounds from the zero model.
std::vector<RoundReport> RunTraining(const FederationConfig& cfg,
                                     std::span<const ClientShard> shards,
                                     std::span<const FeatureRecord> test);

}  // namespace ddph

#endif  // DDPH_FEDERATION_HPP_

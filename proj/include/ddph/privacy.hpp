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

// Client-level distributed differential privacy for averaged model updates.
//
// Each client clips its update to L2 norm C. Replacing one client moves the
// uniform average of n updates by at most S = 2C/n, so the Gaussian mechanism
// needs aggregate noise
//
//   sigma_eff = S * sqrt(2 ln(1.25 / delta_r)) / eps_r
//
// per round. Clients never trust the server: each adds N(0, sigma_c^2) with
// sigma_c = sigma_eff * sqrt(n) before upload, and the mean of n such draws
// has standard deviation exactly sigma_eff.
//
// The budget (eps_total, delta_total) is split evenly over T rounds and
// composed with basic composition.

#ifndef DDPH_PRIVACY_HPP_
#define DDPH_PRIVACY_HPP_

#include <cstdint>
#include <limits>
#include <string>

#include "ddph/svm.hpp"

namespace ddph {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PrivacySpec {
  // +infinity disables noise (non-private reference runs).
  double epsilon_total = 1.0;
  double delta_total = 1e-5;
  // L2 clip bound on (weights, bias); +infinity disables clipping.
  double clip_bound = 1.0;
  int rounds = 1;
  int n_clients = 1;

  bool IsPrivate() const { return epsilon_total != kInfinity; }
  double EpsilonPerRound() const { return epsilon_total / rounds; }
  double DeltaPerRound() const { return delta_total / rounds; }

  // Throws ConfigError when a field is out of range.
  void Validate() const;
};

struct AccountantState {
  double spent_epsilon = 0.0;
  double spent_delta = 0.0;
  int rounds_charged = 0;

  bool operator==(const AccountantState&) const = default;
};

// Scales `update` down to norm C when it is longer; otherwise returns it
// unchanged. Throws NumericError on non-finite input.
ModelVector ClipUpdate(const ModelVector& update, double clip_bound);

// Aggregate noise standard deviation for client-level (eps_r, delta_r)-DP of
// the average of n clipped updates. Throws ConfigError on eps_r <= 0 or
// delta_r outside (0, 1).
double CalibrateSigmaEff(double clip_bound, int n_clients, double eps_r,
                         double delta_r);

// Zero for a non-private spec, otherwise CalibrateSigmaEff at the per-round
// budget.
double SigmaEff(const PrivacySpec& spec);

// Per-client standard deviation that makes the average of n client draws
// carry sigma_eff.
double ClientNoiseSigma(double sigma_eff, int n_clients);

// Adds independent N(0, sigma^2) to every coordinate, bias included.
ModelVector AddGaussian(const ModelVector& v, double sigma, uint64_t seed);

// Basic composition. Throws BudgetError once all T rounds are charged.
AccountantState ChargeRound(const AccountantState& state,
                            const PrivacySpec& spec);

// Human-readable per-round budget breakdown.
std::string BudgetReport(const PrivacySpec& spec, const AccountantState& state);

}  // namespace ddph

#endif  // DDPH_PRIVACY_HPP_

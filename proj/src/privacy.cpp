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

#include "ddph/privacy.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "ddph/errors.hpp"
#include "ddph/rng.hpp"

namespace ddph {

void PrivacySpec::Validate() const {
  if (!(epsilon_total > 0.0)) {
    throw ConfigError("privacy.epsilon_total must be > 0");
  }
  if (!(delta_total > 0.0 && delta_total < 1.0)) {
    throw ConfigError("privacy.delta_total must be in (0, 1)");
  }
  if (!(clip_bound > 0.0)) throw ConfigError("privacy.clip_bound must be > 0");
  if (IsPrivate() && !std::isfinite(clip_bound)) {
    throw ConfigError("privacy.clip_bound must be finite when epsilon is finite");
  }
  if (rounds < 1) throw ConfigError("privacy.rounds must be >= 1");
  if (n_clients < 1) throw ConfigError("privacy.n_clients must be >= 1");
}

ModelVector ClipUpdate(const ModelVector& update, double clip_bound) {
  Require(clip_bound > 0.0, "ClipUpdate: clip bound must be > 0");
  if (!update.AllFinite()) throw NumericError("ClipUpdate: non-finite update");
  const double norm = update.Norm();
  if (norm <= clip_bound) return update;
  ModelVector clipped = update * (clip_bound / norm);
  // Rounding in the rescale can land one ulp above the bound.
  while (clipped.Norm() > clip_bound) clipped *= 1.0 - 0x1.0p-52;
  return clipped;
}

double CalibrateSigmaEff(double clip_bound, int n_clients, double eps_r,
                         double delta_r) {
  if (!(eps_r > 0.0)) throw ConfigError("per-round epsilon must be > 0");
  if (!(delta_r > 0.0 && delta_r < 1.0)) {
    throw ConfigError("per-round delta must be in (0, 1)");
  }
  if (!(clip_bound > 0.0)) throw ConfigError("clip bound must be > 0");
  if (n_clients < 1) throw ConfigError("n_clients must be >= 1");
  const double sensitivity = 2.0 * clip_bound / n_clients;
  return sensitivity * std::sqrt(2.0 * std::log(1.25 / delta_r)) / eps_r;
}

double SigmaEff(const PrivacySpec& spec) {
  if (!spec.IsPrivate()) return 0.0;
  return CalibrateSigmaEff(spec.clip_bound, spec.n_clients,
                           spec.EpsilonPerRound(), spec.DeltaPerRound());
}

double ClientNoiseSigma(double sigma_eff, int n_clients) {
  Require(sigma_eff >= 0.0, "ClientNoiseSigma: sigma_eff must be >= 0");
  Require(n_clients >= 1, "ClientNoiseSigma: n_clients must be >= 1");
  return sigma_eff * std::sqrt(static_cast<double>(n_clients));
}

ModelVector AddGaussian(const ModelVector& v, double sigma, uint64_t seed) {
  Require(sigma >= 0.0, "AddGaussian: sigma must be >= 0");
  if (sigma == 0.0) return v;
  Rng rng(seed);
  ModelVector out = v;
  for (double& w : out.weights) w += sigma * rng.Normal();
  out.bias += sigma * rng.Normal();
  return out;
}

AccountantState ChargeRound(const AccountantState& state,
                            const PrivacySpec& spec) {
  if (state.rounds_charged >= spec.rounds) {
    throw BudgetError("privacy budget exhausted after " +
                      std::to_string(state.rounds_charged) + " rounds");
  }
  AccountantState next;
  next.rounds_charged = state.rounds_charged + 1;
  // Recomputed from the count so k charges give exactly k * eps_r.
  next.spent_epsilon = next.rounds_charged * spec.EpsilonPerRound();
  next.spent_delta = next.rounds_charged * spec.DeltaPerRound();
  return next;
}

std::string BudgetReport(const PrivacySpec& spec, const AccountantState& state) {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "privacy budget report\n";
  out << "  clients (n):           " << spec.n_clients << "\n";
  out << "  rounds (T):            " << spec.rounds << "\n";
  out << "  clip bound (C):        " << spec.clip_bound << "\n";
  if (!spec.IsPrivate()) {
    out << "  epsilon_total:         inf (non-private reference, no noise)\n";
  } else {
    const double sigma_eff = SigmaEff(spec);
    out << "  epsilon_total:         " << spec.epsilon_total << "\n";
    out << "  delta_total:           " << spec.delta_total << "\n";
    out << "  epsilon per round:     " << spec.EpsilonPerRound() << "\n";
    out << "  delta per round:       " << spec.DeltaPerRound() << "\n";
    out << "  sensitivity (2C/n):    " << 2.0 * spec.clip_bound / spec.n_clients
        << "\n";
    out << "  sigma_eff (aggregate): " << sigma_eff << "\n";
    out << "  sigma_c (per client):  "
        << ClientNoiseSigma(sigma_eff, spec.n_clients) << "\n";
    out << "  composition:           basic (epsilon_total = T * eps_r)\n";
    if (spec.EpsilonPerRound() > 1.0) {
      out << "  caveat: eps_r > 1; the classical Gaussian-mechanism bound "
             "sigma = S*sqrt(2 ln(1.25/delta))/eps is only proven for eps <= 1 "
             "and is applied here beyond that range\n";
    }
  }
  out << "  spent: epsilon=" << state.spent_epsilon
      << " delta=" << state.spent_delta
      << " rounds=" << state.rounds_charged << "/" << spec.rounds << "\n";
  return out.str();
}

}  // namespace ddph

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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ddph/adversary.hpp"
#include "ddph/dataset.hpp"
#include "ddph/errors.hpp"
#include "ddph/experiment.hpp"
#include "ddph/federation.hpp"
#include "ddph/privacy.hpp"
#include "ddph/rng.hpp"
#include "ddph/svm.hpp"

namespace ddph {
namespace {

// ---- pinned tolerances ------------------------------------------------------

constexpr std::size_t kExpectedClean = 683;
constexpr std::size_t kExpectedBenign = 458;
constexpr std::size_t kExpectedMalignant = 241;

constexpr double kBaselineAccuracy = 0.95;
constexpr double kBaselineSeconds = 5.0;
constexpr int kBaselineSeeds = 10;
constexpr int kBaselineEpochs = 200;

constexpr double kDegenerateTolerance = 1e-12;

constexpr int kSweepSeeds = 20;
constexpr double kSaturationPoints = 2.0;
constexpr double kMonotoneViolationPoints = 1.0;
constexpr int kMonotoneViolationsAllowed = 1;
constexpr double kClientSlackPoints = 0.5;

constexpr double kSigmaEffOracle = 4.844805262605389;  // C=1, n=2, eps=1, delta=1e-5
constexpr double kSigmaTolerance = 1e-9;
constexpr int kClipTrials = 10000;
constexpr int kNoiseSamples = 100000;
constexpr double kMomentTolerance = 0.02;
constexpr double kKsCritical = 0.005146923;  // 1.6276 / sqrt(1e5)

constexpr double kMinAsr = 0.8;
constexpr double kMaxCleanDropPoints = 3.0;
constexpr int kBackdoorSeeds = 10;

constexpr int kGradientPoints = 100;
constexpr double kGradientStep = 1e-5;
constexpr double kGradientRelTolerance = 1e-4;

// -----------------------------------------------------------------------------

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

double Points(double accuracy) { return 100.0 * accuracy; }

const std::vector<FeatureRecord>& CleanData() {
  static const std::vector<FeatureRecord> data = LoadCleanDataset(DDPH_TEST_DATA);
  return data;
}

// Mean final-round accuracy per (epsilon, n_clients).
std::map<std::pair<double, int>, double> FinalAccuracy(const std::vector<MetricsRow>& rows,
                                                       int rounds) {
  std::map<std::pair<double, int>, std::pair<double, int>> acc;
  for (const MetricsRow& r : rows) {
    if (r.round != rounds) continue;
    auto& slot = acc[{r.epsilon, r.n_clients}];
    slot.first += r.test_accuracy;
    slot.second += 1;
  }
  std::map<std::pair<double, int>, double> out;
  for (const auto& [key, sum] : acc) out[key] = sum.first / sum.second;
  return out;
}

const std::map<std::pair<double, int>, double>& PutSweep() {
  static const std::map<std::pair<double, int>, double> result = [] {
    ExperimentConfig cfg;
    cfg.dataset_path = DDPH_TEST_DATA;
    cfg.client_grid = {5, 10, 20};
    cfg.seeds.clear();
    for (int s = 0; s < kSweepSeeds; ++s) cfg.seeds.push_back(s);
    cfg.include_reference = false;
    return FinalAccuracy(SweepPut(cfg, CleanData()), cfg.rounds);
  }();
  return result;
}

Outcome DatasetFidelity() {
  const std::vector<RawRecord> raw = LoadRaw(DDPH_TEST_DATA);
  const LabelCounts raw_counts = CountClasses(raw);
  const std::vector<RawRecord> clean = Clean(raw);
  const LabelCounts counts = CountClasses(clean);
  Outcome o;
  o.pass = clean.size() == kExpectedClean && counts.benign == kExpectedBenign &&
           counts.malignant == kExpectedMalignant;
  o.detail = "clean " + std::to_string(clean.size()) + " records, benign " +
             std::to_string(counts.benign) + " / malignant " + std::to_string(counts.malignant) +
             " (required 683 with 458/241); raw file " + std::to_string(raw.size()) +
             " records with " + std::to_string(raw_counts.benign) + "/" +
             std::to_string(raw_counts.malignant);
  return o;
}

Outcome CentralizedBaseline() {
  const auto start = std::chrono::steady_clock::now();
  double sum = 0.0;
  for (int seed = 0; seed < kBaselineSeeds; ++seed) {
    const TrainTestSplit split = StratifiedSplit(CleanData(), 0.2, seed);
    const TrainSpec spec{0.05, 0.001, kBaselineEpochs, BatchMode::kSinglePassShuffled};
    const ModelVector model = LocalTrain(ModelVector::Zero(), split.train, spec, seed);
    sum += Accuracy(model, split.test);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double mean = sum / kBaselineSeeds;
  return {mean >= kBaselineAccuracy && seconds < kBaselineSeconds,
          Fmt("mean accuracy %.4f over 10 seeds (>= %.2f), %.2f s (< %.0f s)", mean,
              kBaselineAccuracy, seconds, kBaselineSeconds)};
}

Outcome DegenerateFederation() {
  const TrainTestSplit split = StratifiedSplit(CleanData(), 0.2, 0);
  const std::vector<ClientShard> shards = Shard(split.train, 1, {}, 0);
  FederationConfig cfg;
  cfg.n_clients = 1;
  cfg.rounds = 8;
  cfg.privacy = {kInfinity, 1e-5, kInfinity, cfg.rounds, 1};
  cfg.train = {0.05, 0.001, 5, BatchMode::kFull};
  const ModelVector federated = RunTraining(cfg, shards, split.test).back().global_after;

  TrainSpec central = cfg.train;
  central.local_epochs = cfg.rounds * cfg.train.local_epochs;
  const ModelVector centralized = LocalTrain(ModelVector::Zero(), split.train, central, 0);

  double worst = std::abs(federated.bias - centralized.bias);
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    worst = std::max(worst, std::abs(federated.weights[i] - centralized.weights[i]));
  }
  return {worst <= kDegenerateTolerance,
          Fmt("max coordinate difference %.3g (<= 1e-12), 8 rounds x 5 epochs vs 40 epochs",
              worst)};
}

Outcome Saturation() {
  const auto& acc = PutSweep();
  const double a28 = acc.at({28.0, 20});
  const double a50 = acc.at({50.0, 20});
  const double gap = std::abs(Points(a28) - Points(a50));
  return {gap <= kSaturationPoints,
          Fmt("n=20, %g seeds: acc(28)=%.4f acc(50)=%.4f gap %.2f points (<= 2)", kSweepSeeds,
              a28, a50, gap)};
}

Outcome MonotoneTrend() {
  const auto& acc = PutSweep();
  const std::vector<double> grid = {1, 5, 10, 20, 28, 30, 50};
  int violations = 0;
  double worst = 0.0;
  std::string curve;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = acc.at({grid[i], 20});
    curve += Fmt("%.4f ", a);
    if (i == 0) continue;
    const double drop = Points(acc.at({grid[i - 1], 20})) - Points(a);
    if (drop > 0) {
      ++violations;
      worst = std::max(worst, drop);
    }
  }
  const bool pass = violations == 0 ||
                    (violations <= kMonotoneViolationsAllowed && worst <= kMonotoneViolationPoints);
  return {pass, "n=20 curve " + curve +
                    Fmt("; %g violations, worst %.2f points", violations, worst)};
}

Outcome ClientEffect() {
  const auto& acc = PutSweep();
  bool pass = true;
  std::string detail;
  for (double eps : {20.0, 30.0}) {
    const double a5 = Points(acc.at({eps, 5}));
    const double a10 = Points(acc.at({eps, 10}));
    const double a20 = Points(acc.at({eps, 20}));
    pass = pass && a20 - a10 >= -kClientSlackPoints && a10 - a5 >= -kClientSlackPoints;
    detail += Fmt("eps=%g: n20 %.2f, n10 %.2f, n5 %.2f; ", eps, a20, a10, a5);
  }
  return {pass, detail + "slack 0.5 points"};
}

double NormalCdf(double x, double sigma) {
  return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

Outcome PrivacyMechanism() {
  std::string detail;
  // Closed form.
  const double sigma = CalibrateSigmaEff(1.0, 2, 1.0, 1e-5);
  const bool formula = std::abs(sigma - kSigmaEffOracle) <= kSigmaTolerance;
  detail += Fmt("sigma_eff %.15g; ", sigma);

  // Clipping.
  Rng rng(7);
  bool clip_ok = true;
  for (int t = 0; t < kClipTrials; ++t) {
    ModelVector v;
    const double scale = std::exp(3.0 * rng.Normal());
    for (double& w : v.weights) w = scale * rng.Normal();
    v.bias = scale * rng.Normal();
    const double c = std::exp(rng.Normal());
    clip_ok = clip_ok && ClipUpdate(v, c).Norm() <= c;
  }

  // Distributed noise: mean of n shares at sigma_c against N(0, sigma_eff^2).
  const int n = 20;
  const double sigma_eff = CalibrateSigmaEff(1.0, n, 2.8, 1e-6);
  const double sigma_c = ClientNoiseSigma(sigma_eff, n);
  std::vector<double> samples;
  samples.reserve(kNoiseSamples);
  for (uint64_t draw = 0; samples.size() < static_cast<std::size_t>(kNoiseSamples); ++draw) {
    ModelVector mean;
    for (int c = 0; c < n; ++c) {
      mean += AddGaussian(ModelVector::Zero(), sigma_c,
                          DeriveSeed(2026, {draw, static_cast<uint64_t>(c)}));
    }
    mean *= 1.0 / n;
    samples.insert(samples.end(), mean.weights.begin(), mean.weights.end());
    samples.push_back(mean.bias);
  }
  samples.resize(kNoiseSamples);
  double sum = 0.0, sum_sq = 0.0, sum_4 = 0.0;
  for (double x : samples) {
    sum += x;
    sum_sq += x * x;
    sum_4 += x * x * x * x;
  }
  const double m = static_cast<double>(kNoiseSamples);
  const double sd_ratio = std::sqrt(sum_sq / m) / sigma_eff;
  const double kurt_ratio = (sum_4 / m) / (3.0 * std::pow(sigma_eff, 4));
  const double mean_sd = (sum / m) / sigma_eff;
  std::sort(samples.begin(), samples.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = NormalCdf(samples[i], sigma_eff);
    ks = std::max({ks, (i + 1) / m - f, f - i / m});
  }
  const bool noise_ok = std::abs(sd_ratio - 1.0) <= kMomentTolerance &&
                        std::abs(kurt_ratio - 1.0) <= kMomentTolerance &&
                        std::abs(mean_sd) <= kMomentTolerance && ks < kKsCritical;
  detail += Fmt("sd ratio %.4f, 4th-moment ratio %.4f, KS %.5f; ", sd_ratio, kurt_ratio, ks);

  // Accountant.
  const PrivacySpec spec{30.0, 1e-5, 1.0, 50, 20};
  AccountantState state;
  for (int r = 0; r < spec.rounds; ++r) state = ChargeRound(state, spec);
  bool exhausted = false;
  try {
    ChargeRound(state, spec);
  } catch (const BudgetError&) {
    exhausted = true;
  }
  const bool accountant_ok = std::abs(state.spent_epsilon - 30.0) <= 1e-9 && exhausted;
  detail += Fmt("spent %.12g of 30", state.spent_epsilon);

  return {formula && clip_ok && noise_ok && accountant_ok, detail};
}

// Scenario: n=20, 25% poisoned clients at rate 0.5, non-private and unclipped,
// 30 rounds of 10 local epochs, no regularization.
Outcome Backdoor() {
  AttackConfig atk;
  atk.enabled = true;
  double asr_sum = 0.0, defended_sum = 0.0, drop_sum = 0.0;
  for (int seed = 0; seed < kBackdoorSeeds; ++seed) {
    const TrainTestSplit split = StratifiedSplit(CleanData(), 0.2, seed);
    const std::vector<ClientShard> clean = Shard(split.train, 20, {}, seed);
    const std::vector<ClientShard> poisoned = PoisonShards(clean, atk, seed);
    FederationConfig cfg;
    cfg.n_clients = 20;
    cfg.rounds = 30;
    cfg.privacy = {kInfinity, 1e-5, kInfinity, 30, 20};
    cfg.train = {0.05, 0.0, 10, BatchMode::kSinglePassShuffled};
    cfg.master_seed = seed;
    const double clean_acc = RunTraining(cfg, clean, split.test).back().test_accuracy;
    const RoundReport attacked = RunTraining(cfg, poisoned, split.test).back();
    asr_sum += AttackSuccessRate(attacked.global_after, split.test, atk);
    drop_sum += Points(clean_acc) - Points(attacked.test_accuracy);
    cfg.defense.enabled = true;
    defended_sum +=
        AttackSuccessRate(RunTraining(cfg, poisoned, split.test).back().global_after, split.test, atk);
  }
  const double asr = asr_sum / kBackdoorSeeds;
  const double defended = defended_sum / kBackdoorSeeds;
  const double drop = drop_sum / kBackdoorSeeds;
  const bool pass = asr >= kMinAsr && drop <= kMaxCleanDropPoints && defended < asr;
  return {pass, Fmt("undefended ASR %.4f (>= 0.8), clean drop %.2f points (<= 3), "
                    "defended ASR %.4f (< undefended)",
                    asr, drop, defended)};
}

Outcome Determinism() {
  ExperimentConfig cfg;
  cfg.dataset_path = DDPH_TEST_DATA;
  cfg.epsilon_grid = {5, 30};
  cfg.client_grid = {5, 20};
  cfg.seeds = {0, 1, 2};
  cfg.dropout_probability = 0.2;
  cfg.attack.enabled = true;
  cfg.defense.enabled = true;
  const std::string a = FormatCsv(SweepPut(cfg, CleanData()));
  const std::string b = FormatCsv(SweepPut(cfg, CleanData()));
  cfg.parallel_clients = true;
  const std::string c = FormatCsv(SweepPut(cfg, CleanData()));
  return {a == b && a == c, "repeat identical: " + std::string(a == b ? "yes" : "no") +
                                ", serial vs parallel identical: " + (a == c ? "yes" : "no") +
                                ", " + std::to_string(a.size()) + " bytes"};
}

Outcome GradientCorrectness() {
  Rng rng(99);
  int checked = 0;
  double worst = 0.0;
  while (checked < kGradientPoints) {
    std::vector<FeatureRecord> batch;
    for (int i = 0; i < 50; ++i) batch.push_back(CleanData()[rng.Below(CleanData().size())]);
    ModelVector m;
    for (double& w : m.weights) w = 2.0 * rng.Uniform() - 1.0;
    m.bias = 2.0 * rng.Uniform() - 1.0;
    const double lambda = 0.01 * rng.Uniform();
    bool degenerate = false;
    for (const FeatureRecord& r : batch) {
      if (std::abs(Sign(r.label) * m.Score(r.features) - 1.0) < 1e-3) degenerate = true;
    }
    if (degenerate) continue;
    ++checked;
    const ModelVector g = HingeSubgradient(m, batch, lambda);
    for (std::size_t k = 0; k <= kNumFeatures; ++k) {
      ModelVector plus = m, minus = m;
      (k < kNumFeatures ? plus.weights[k] : plus.bias) += kGradientStep;
      (k < kNumFeatures ? minus.weights[k] : minus.bias) -= kGradientStep;
      const double fd =
          (HingeLoss(plus, batch, lambda) - HingeLoss(minus, batch, lambda)) / (2 * kGradientStep);
      const double a = k < kNumFeatures ? g.weights[k] : g.bias;
      worst = std::max(worst, std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-6}));
    }
  }
  return {worst <= kGradientRelTolerance,
          Fmt("%g points, max relative error %.3g (<= 1e-4)", checked, worst)};
}

}  // namespace
}  // namespace ddph

int main() {
  using ddph::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"dataset fidelity", ddph::DatasetFidelity},
      {"centralized baseline", ddph::CentralizedBaseline},
      {"federated equals centralized (degenerate)", ddph::DegenerateFederation},
      {"accuracy saturation eps 28 vs 50", ddph::Saturation},
      {"accuracy non-decreasing in eps", ddph::MonotoneTrend},
      {"more clients, higher accuracy", ddph::ClientEffect},
      {"privacy mechanism checks", ddph::PrivacyMechanism},
      {"backdoor and defense", ddph::Backdoor},
      {"determinism", ddph::Determinism},
      {"gradient correctness", ddph::GradientCorrectness},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

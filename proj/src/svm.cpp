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

#include "ddph/svm.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ddph/errors.hpp"
#include "ddph/rng.hpp"

namespace ddph {

double ModelVector::Score(const Features& x) const {
  double s = bias;
  for (std::size_t i = 0; i < kNumFeatures; ++i) s += weights[i] * x[i];
  return s;
}

double ModelVector::Norm() const {
  double sq = bias * bias;
  for (double w : weights) sq += w * w;
  return std::sqrt(sq);
}

bool ModelVector::AllFinite() const {
  if (!std::isfinite(bias)) return false;
  for (double w : weights) {
    if (!std::isfinite(w)) return false;
  }
  return true;
}

ModelVector& ModelVector::operator+=(const ModelVector& other) {
  for (std::size_t i = 0; i < kNumFeatures; ++i) weights[i] += other.weights[i];
  bias += other.bias;
  return *this;
}

ModelVector& ModelVector::operator-=(const ModelVector& other) {
  for (std::size_t i = 0; i < kNumFeatures; ++i) weights[i] -= other.weights[i];
  bias -= other.bias;
  return *this;
}

ModelVector& ModelVector::operator*=(double scale) {
  for (double& w : weights) w *= scale;
  bias *= scale;
  return *this;
}

ModelVector operator+(ModelVector a, const ModelVector& b) { return a += b; }
ModelVector operator-(ModelVector a, const ModelVector& b) { return a -= b; }
ModelVector operator*(ModelVector a, double scale) { return a *= scale; }
ModelVector operator*(double scale, ModelVector a) { return a *= scale; }

void TrainSpec::Validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("train.learning_rate must be a finite value >= 0");
  }
  if (!(regularization >= 0.0) || !std::isfinite(regularization)) {
    throw ConfigError("train.regularization must be a finite value >= 0");
  }
  if (local_epochs < 1) throw ConfigError("train.local_epochs must be >= 1");
}

Label Predict(const ModelVector& model, const Features& x) {
  return model.Score(x) >= 0.0 ? Label::kMalignant : Label::kBenign;
}

double HingeLoss(const ModelVector& model, std::span<const FeatureRecord> data,
                 double lambda) {
  Require(!data.empty(), "HingeLoss: empty data");
  double total = 0.0;
  for (const FeatureRecord& r : data) {
    const double margin = Sign(r.label) * model.Score(r.features);
    if (margin < 1.0) total += 1.0 - margin;
  }
  double w_sq = 0.0;
  for (double w : model.weights) w_sq += w * w;
  return total / static_cast<double>(data.size()) + 0.5 * lambda * w_sq;
}

namespace {

// Adds the hinge subgradient of one record, scaled by `scale`, into `grad`.
void AccumulateHinge(const ModelVector& model, const FeatureRecord& r,
                     double scale, ModelVector& grad) {
  const double y = Sign(r.label);
  if (y * model.Score(r.features) >= 1.0) return;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    grad.weights[i] -= scale * y * r.features[i];
  }
  grad.bias -= scale * y;
}

void AddRegularizer(const ModelVector& model, double lambda, ModelVector& grad) {
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    grad.weights[i] += lambda * model.weights[i];
  }
}

void Step(ModelVector& model, const ModelVector& grad, double lr) {
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    model.weights[i] -= lr * grad.weights[i];
  }
  model.bias -= lr * grad.bias;
}

}  // namespace

ModelVector HingeSubgradient(const ModelVector& model,
                             std::span<const FeatureRecord> data, double lambda) {
  Require(!data.empty(), "HingeSubgradient: empty data");
  ModelVector grad;
  const double scale = 1.0 / static_cast<double>(data.size());
  for (const FeatureRecord& r : data) AccumulateHinge(model, r, scale, grad);
  AddRegularizer(model, lambda, grad);
  return grad;
}

ModelVector LocalTrain(const ModelVector& start,
                       std::span<const FeatureRecord> records,
                       const TrainSpec& spec, uint64_t seed) {
  Require(!records.empty(), "LocalTrain: empty shard");
  ModelVector model = start;
  if (spec.batch_mode == BatchMode::kFull) {
    for (int epoch = 0; epoch < spec.local_epochs; ++epoch) {
      Step(model, HingeSubgradient(model, records, spec.regularization),
           spec.learning_rate);
    }
  } else {
    Rng rng(seed);
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (int epoch = 0; epoch < spec.local_epochs; ++epoch) {
      rng.Shuffle(order);
      for (std::size_t idx : order) {
        ModelVector grad;
        AccumulateHinge(model, records[idx], 1.0, grad);
        AddRegularizer(model, spec.regularization, grad);
        Step(model, grad, spec.learning_rate);
      }
    }
  }
  if (!model.AllFinite()) {
    throw NumericError("local training diverged (non-finite parameters); "
                       "learning_rate=" + std::to_string(spec.learning_rate));
  }
  return model - start;
}

ModelVector LocalTrain(const ModelVector& start, const ClientShard& shard,
                       const TrainSpec& spec, uint64_t seed) {
  return LocalTrain(start, std::span<const FeatureRecord>(shard.records), spec,
                    seed);
}

double Accuracy(const ModelVector& model, std::span<const FeatureRecord> data) {
  Require(!data.empty(), "Accuracy: empty data");
  std::size_t correct = 0;
  for (const FeatureRecord& r : data) {
    if (Predict(model, r.features) == r.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace ddph

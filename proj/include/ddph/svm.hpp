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

// Primal linear soft-margin SVM.
//
// Objective over a dataset D with regularization lambda:
//
//   L(w, b) = (1/|D|) sum_i max(0, 1 - y_i (w.x_i + b)) + (lambda/2) |w|^2
//
// The bias is not regularized. Training is plain subgradient descent; the
// quantity a client shares is the delta from its starting model.

#ifndef DDPH_SVM_HPP_
#define DDPH_SVM_HPP_

#include <cstdint>
#include <span>

#include "ddph/dataset.hpp"

namespace ddph {

// Linear model parameters. Also used for update deltas and noise vectors, so
// it supports vector-space arithmetic over (weights, bias) jointly.
struct ModelVector {
  Features weights{};
  double bias = 0.0;

  static ModelVector Zero() { return {}; }

  double Score(const Features& x) const;
  // L2 norm over weights and bias together.
  double Norm() const;
  bool AllFinite() const;

  ModelVector& operator+=(const ModelVector& other);
  ModelVector& operator-=(const ModelVector& other);
  ModelVector& operator*=(double scale);

  bool operator==(const ModelVector&) const = default;
};

ModelVector operator+(ModelVector a, const ModelVector& b);
ModelVector operator-(ModelVector a, const ModelVector& b);
ModelVector operator*(ModelVector a, double scale);
ModelVector operator*(double scale, ModelVector a);

enum class BatchMode {
  // One step per epoch along the mean subgradient of the whole shard.
  kFull,
  // One step per record, visiting the shard in a fresh shuffled order each
  // epoch.
  kSinglePassShuffled,
};

struct TrainSpec {
  double learning_rate = 0.05;
  double regularization = 0.001;
  int local_epochs = 5;
  BatchMode batch_mode = BatchMode::kSinglePassShuffled;

  // Throws ConfigError when a field is out of range.
  void Validate() const;
};

// +1 when the score is >= 0 (ties flag malignant), else -1.
Label Predict(const ModelVector& model, const Features& x);

double HingeLoss(const ModelVector& model, std::span<const FeatureRecord> data,
                 double lambda);

// Subgradient of HingeLoss with respect to (weights, bias). Where a margin is
// exactly 1 the zero branch is taken.
ModelVector HingeSubgradient(const ModelVector& model,
                             std::span<const FeatureRecord> data, double lambda);

// Runs spec.local_epochs passes from `start` over `records` and returns
// (final - start). Throws NumericError on non-finite parameters.
ModelVector LocalTrain(const ModelVector& start,
                       std::span<const FeatureRecord> records,
                       const TrainSpec& spec, uint64_t seed);
ModelVector LocalTrain(const ModelVector& start, const ClientShard& shard,
                       const TrainSpec& spec, uint64_t seed);

double Accuracy(const ModelVector& model, std::span<const FeatureRecord> data);

}  // namespace ddph

#endif  // DDPH_SVM_HPP_

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

// Breast Cancer Wisconsin (Original) ingestion: parse the UCI
// `breast-cancer-wisconsin.data` file, drop incomplete rows, scale the nine
// ordinal attributes to [0, 1], split into train/test and deal the training
// set out to simulated clinics.

#ifndef DDPH_DATASET_HPP_
#define DDPH_DATASET_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ddph {

inline constexpr std::size_t kNumFeatures = 9;
inline constexpr int kAttributeMin = 1;
inline constexpr int kAttributeMax = 10;
inline constexpr int kBenignClassCode = 2;
inline constexpr int kMalignantClassCode = 4;

// Column order of the UCI file (after the sample id).
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "clump_thickness",      "uniformity_cell_size", "uniformity_cell_shape",
    "marginal_adhesion",    "single_epithelial_size", "bare_nuclei",
    "bland_chromatin",      "normal_nucleoli",      "mitoses"};
inline constexpr std::size_t kMitosesIndex = 8;

enum class Label : int { kBenign = -1, kMalignant = 1 };

constexpr double Sign(Label label) { return static_cast<double>(label); }

using Features = std::array<double, kNumFeatures>;

struct RawRecord {
  int64_t sample_id = 0;
  std::array<std::optional<int>, kNumFeatures> attributes{};
  int class_code = kBenignClassCode;

  bool HasMissing() const;
  bool operator==(const RawRecord&) const = default;
};

struct FeatureRecord {
  Features features{};
  Label label = Label::kBenign;

  bool operator==(const FeatureRecord&) const = default;
  auto operator<=>(const FeatureRecord&) const = default;
};

struct ClientShard {
  int client_id = 0;
  std::vector<FeatureRecord> records;
  bool poisoned = false;

  bool operator==(const ClientShard&) const = default;
};

// Parses UCI-format lines. Blank lines are skipped; `source` names the input
// in error messages. Throws DataError naming the offending line number.
std::vector<RawRecord> ParseRaw(std::istream& in, std::string_view source);

// Reads the file at `path`. Throws DataError if it cannot be opened.
std::vector<RawRecord> LoadRaw(const std::filesystem::path& path);

// Drops every record with a missing attribute, preserving order.
std::vector<RawRecord> Clean(std::span<const RawRecord> raw);

// feature_i = (attribute_i - 1) / 9; class 2 -> -1, class 4 -> +1.
// A record with a missing attribute is a contract violation.
FeatureRecord Normalize(const RawRecord& raw);
std::vector<FeatureRecord> NormalizeAll(std::span<const RawRecord> raw);

// Inverse of the feature scaling: recovers the integer attributes.
std::array<int, kNumFeatures> Denormalize(const Features& features);

// Convenience: LoadRaw -> Clean -> NormalizeAll.
std::vector<FeatureRecord> LoadCleanDataset(const std::filesystem::path& path);

struct LabelCounts {
  std::size_t benign = 0;
  std::size_t malignant = 0;
};
LabelCounts CountLabels(std::span<const FeatureRecord> data);
LabelCounts CountClasses(std::span<const RawRecord> raw);

struct TrainTestSplit {
  std::vector<FeatureRecord> train;
  std::vector<FeatureRecord> test;
};

// Per label, round(test_fraction * count) records go to test. Both halves
// keep the input's relative order. Throws ConfigError unless
// 0 < test_fraction < 1.
TrainTestSplit StratifiedSplit(std::span<const FeatureRecord> data,
                               double test_fraction, uint64_t seed);

enum class ShardMode { kIid, kLabelSkew };

struct ShardingSpec {
  ShardMode mode = ShardMode::kIid;
  // Dirichlet concentration for kLabelSkew; smaller means more skew.
  double alpha = 1.0;
};

// Partitions `train` over `n_clients` shards with ids 0..n-1.
//
// kIid shuffles and deals contiguous chunks whose sizes differ by at most one.
// kLabelSkew draws, for each label, Dirichlet(alpha, ..., alpha) proportions
// over clients and allocates that label's records by largest remainder; any
// client left empty takes one record from the largest shard.
//
// Throws ConfigError if n_clients < 1 or n_clients > train.size().
std::vector<ClientShard> Shard(std::span<const FeatureRecord> train,
                               int n_clients, const ShardingSpec& spec,
                               uint64_t seed);

}  // namespace ddph

#endif  // DDPH_DATASET_HPP_

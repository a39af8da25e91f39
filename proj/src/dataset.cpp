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

#include "ddph/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "ddph/errors.hpp"
#include "ddph/rng.hpp"

namespace ddph {
namespace {

constexpr std::size_t kColumns = kNumFeatures + 2;

std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

template <typename Int>
bool ParseInt(std::string_view field, Int& out) {
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

[[noreturn]] void Fail(std::string_view source, std::size_t line_no,
                       const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line_no << ": " << what;
  throw DataError(msg.str());
}

RawRecord ParseLine(std::string_view line, std::string_view source,
                    std::size_t line_no) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() != kColumns) {
    Fail(source, line_no,
         "expected " + std::to_string(kColumns) + " columns, got " +
             std::to_string(fields.size()));
  }

  RawRecord record;
  if (!ParseInt(fields[0], record.sample_id)) {
    Fail(source, line_no, "non-integer sample id '" + std::string(fields[0]) + "'");
  }
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    const std::string_view field = fields[i + 1];
    if (field == "?") continue;
    int value = 0;
    if (!ParseInt(field, value)) {
      Fail(source, line_no, "non-integer attribute " + std::to_string(i + 1) +
                                " '" + std::string(field) + "'");
    }
    if (value < kAttributeMin || value > kAttributeMax) {
      Fail(source, line_no, "attribute " + std::to_string(i + 1) +
                                " out of range [1,10]: " + std::to_string(value));
    }
    record.attributes[i] = value;
  }
  if (!ParseInt(fields[kColumns - 1], record.class_code) ||
      (record.class_code != kBenignClassCode &&
       record.class_code != kMalignantClassCode)) {
    Fail(source, line_no,
         "class must be 2 or 4, got '" + std::string(fields[kColumns - 1]) + "'");
  }
  return record;
}

}  // namespace

bool RawRecord::HasMissing() const {
  return std::any_of(attributes.begin(), attributes.end(),
                     [](const std::optional<int>& a) { return !a.has_value(); });
}

std::vector<RawRecord> ParseRaw(std::istream& in, std::string_view source) {
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view trimmed = Trim(line);
    if (trimmed.empty()) continue;
    records.push_back(ParseLine(trimmed, source, line_no));
  }
  return records;
}

std::vector<RawRecord> LoadRaw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path.string());
  return ParseRaw(in, path.string());
}

std::vector<RawRecord> Clean(std::span<const RawRecord> raw) {
  std::vector<RawRecord> out;
  out.reserve(raw.size());
  std::copy_if(raw.begin(), raw.end(), std::back_inserter(out),
               [](const RawRecord& r) { return !r.HasMissing(); });
  return out;
}

FeatureRecord Normalize(const RawRecord& raw) {
  Require(!raw.HasMissing(), "Normalize: record " +
                                 std::to_string(raw.sample_id) +
                                 " has a missing attribute");
  FeatureRecord out;
  constexpr double kSpan = kAttributeMax - kAttributeMin;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    out.features[i] = (*raw.attributes[i] - kAttributeMin) / kSpan;
  }
  out.label = raw.class_code == kMalignantClassCode ? Label::kMalignant
                                                    : Label::kBenign;
  return out;
}

std::vector<FeatureRecord> NormalizeAll(std::span<const RawRecord> raw) {
  std::vector<FeatureRecord> out;
  out.reserve(raw.size());
  for (const RawRecord& r : raw) out.push_back(Normalize(r));
  return out;
}

std::array<int, kNumFeatures> Denormalize(const Features& features) {
  std::array<int, kNumFeatures> out{};
  constexpr double kSpan = kAttributeMax - kAttributeMin;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    out[i] = static_cast<int>(std::lround(features[i] * kSpan)) + kAttributeMin;
  }
  return out;
}

std::vector<FeatureRecord> LoadCleanDataset(const std::filesystem::path& path) {
  const std::vector<RawRecord> raw = LoadRaw(path);
  return NormalizeAll(Clean(raw));
}

LabelCounts CountLabels(std::span<const FeatureRecord> data) {
  LabelCounts counts;
  for (const FeatureRecord& r : data) {
    (r.label == Label::kBenign ? counts.benign : counts.malignant)++;
  }
  return counts;
}

LabelCounts CountClasses(std::span<const RawRecord> raw) {
  LabelCounts counts;
  for (const RawRecord& r : raw) {
    (r.class_code == kBenignClassCode ? counts.benign : counts.malignant)++;
  }
  return counts;
}

TrainTestSplit StratifiedSplit(std::span<const FeatureRecord> data,
                               double test_fraction, uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must be in (0, 1), got " +
                      std::to_string(test_fraction));
  }
  std::vector<bool> in_test(data.size(), false);
  for (Label label : {Label::kBenign, Label::kMalignant}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data[i].label == label) idx.push_back(i);
    }
    Rng rng(DeriveSeed(seed, {static_cast<uint64_t>(Stream::kSplit),
                              static_cast<uint64_t>(Sign(label) + 1)}));
    rng.Shuffle(idx);
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < n_test && k < idx.size(); ++k) in_test[idx[k]] = true;
  }
  TrainTestSplit split;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (in_test[i] ? split.test : split.train).push_back(data[i]);
  }
  return split;
}

namespace {

std::vector<ClientShard> ShardIid(std::span<const FeatureRecord> train,
                                  int n_clients, Rng& rng) {
  std::vector<FeatureRecord> shuffled(train.begin(), train.end());
  // A single clinic holds the training set as-is.
  if (n_clients > 1) rng.Shuffle(shuffled);
  const std::size_t n = static_cast<std::size_t>(n_clients);
  const std::size_t base = shuffled.size() / n;
  const std::size_t extra = shuffled.size() % n;
  std::vector<ClientShard> shards(n);
  std::size_t cursor = 0;
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t size = base + (c < extra ? 1 : 0);
    shards[c].client_id = static_cast<int>(c);
    shards[c].records.assign(shuffled.begin() + cursor,
                             shuffled.begin() + cursor + size);
    cursor += size;
  }
  return shards;
}

// Largest-remainder apportionment of `total` items by `weights`.
std::vector<std::size_t> Apportion(std::size_t total,
                                   const std::vector<double>& weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> counts(weights.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < weights.size(); ++c) {
    const double exact = sum > 0.0 ? total * weights[c] / sum
                                   : static_cast<double>(total) / weights.size();
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) {
    counts[remainders[k % remainders.size()].second]++;
  }
  return counts;
}

std::vector<ClientShard> ShardLabelSkew(std::span<const FeatureRecord> train,
                                        int n_clients, double alpha, Rng& rng) {
  const std::size_t n = static_cast<std::size_t>(n_clients);
  std::vector<ClientShard> shards(n);
  for (std::size_t c = 0; c < n; ++c) shards[c].client_id = static_cast<int>(c);

  for (Label label : {Label::kBenign, Label::kMalignant}) {
    std::vector<FeatureRecord> pool;
    for (const FeatureRecord& r : train) {
      if (r.label == label) pool.push_back(r);
    }
    rng.Shuffle(pool);
    std::vector<double> weights(n);
    for (double& w : weights) w = rng.Gamma(alpha);
    const std::vector<std::size_t> counts = Apportion(pool.size(), weights);
    std::size_t cursor = 0;
    for (std::size_t c = 0; c < n; ++c) {
      shards[c].records.insert(shards[c].records.end(), pool.begin() + cursor,
                               pool.begin() + cursor + counts[c]);
      cursor += counts[c];
    }
  }

  for (ClientShard& shard : shards) {
    if (!shard.records.empty()) continue;
    auto donor = std::max_element(
        shards.begin(), shards.end(), [](const auto& a, const auto& b) {
          return a.records.size() < b.records.size();
        });
    shard.records.push_back(donor->records.back());
    donor->records.pop_back();
  }
  for (ClientShard& shard : shards) rng.Shuffle(shard.records);
  return shards;
}

}  // namespace

std::vector<ClientShard> Shard(std::span<const FeatureRecord> train,
                               int n_clients, const ShardingSpec& spec,
                               uint64_t seed) {
  if (n_clients < 1) {
    throw ConfigError("n_clients must be >= 1, got " + std::to_string(n_clients));
  }
  if (static_cast<std::size_t>(n_clients) > train.size()) {
    throw ConfigError("n_clients (" + std::to_string(n_clients) +
                      ") exceeds training set size (" +
                      std::to_string(train.size()) + ")");
  }
  Rng rng(DeriveSeed(seed, {static_cast<uint64_t>(Stream::kShard)}));
  if (spec.mode == ShardMode::kLabelSkew) {
    if (!(spec.alpha > 0.0)) throw ConfigError("label-skew alpha must be > 0");
    return ShardLabelSkew(train, n_clients, spec.alpha, rng);
  }
  return ShardIid(train, n_clients, rng);
}

}  // namespace ddph

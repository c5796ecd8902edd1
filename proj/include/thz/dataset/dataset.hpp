// Copyright 2026 The thzsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "thz/common/complex.hpp"
#include "thz/common/normalization.hpp"
#include "thz/signal/generator.hpp"

namespace thz::dataset {

// File layout (little-endian):
//   header:  "TSPC" | u32 version | u32 n_s | u64 count | f64 snr_db |
//            f64 norm_min | f64 norm_max | u64 gen_config_digest      (52 bytes)
//   records: f32 input[2 n_s] | f32 label[2 n_s] | u8 occupancy[ceil(n_s/8)]
// input/label hold the real channel then the imaginary channel, normalized.
// Occupancy bits are LSB-first.
inline constexpr std::uint32_t kDatasetVersion = 1;
inline constexpr std::size_t kHeaderBytes = 52;

struct DatasetHeader {
  std::uint32_t version = kDatasetVersion;
  std::uint32_t n_s = 0;
  std::uint64_t count = 0;
  double snr_db = 0.0;
  double norm_min = 0.0;
  double norm_max = 1.0;
  std::uint64_t gen_config_digest = 0;

  Normalization normalization() const { return {norm_min, norm_max}; }
  std::size_t record_bytes() const;

  friend bool operator==(const DatasetHeader&, const DatasetHeader&) = default;
};

struct Record {
  std::vector<float> input;  // 2 * n_s
  std::vector<float> label;  // 2 * n_s
  std::vector<bool> occupancy;

  friend bool operator==(const Record&, const Record&) = default;
};

struct SplitCounts {
  std::size_t train = 10000;
  std::size_t val = 2000;
  std::size_t test = 2000;
};

struct DatasetPaths {
  std::filesystem::path train;
  std::filesystem::path val;
  std::filesystem::path test;
};

/// FNV-1a over a canonical encoding of every GenConfig field.
std::uint64_t gen_config_digest(const signal::GenConfig& cfg);

nlohmann::json gen_config_to_json(const signal::GenConfig& cfg);
/// Missing keys keep their defaults.
signal::GenConfig gen_config_from_json(const nlohmann::json& j,
                                       const std::filesystem::path& base_dir = {});

/// Global (min, max) over the real and imaginary parts of every noisy and
/// clean spectrum of the training split. Sample k of split s is generated from
/// derive_seed(seed, s, k).
Normalization training_normalization(const signal::GenConfig& cfg, std::size_t train_count,
                                     std::uint64_t seed);

/// Writes train.tspc, val.tspc, test.tspc (plus .json sidecars) into `dir`,
/// creating it if needed. All splits use the training-split normalization.
DatasetPaths generate_dataset(const signal::GenConfig& cfg, const SplitCounts& counts,
                              std::uint64_t seed, const std::filesystem::path& dir);

/// Streams records without loading the file.
class DatasetReader {
 public:
  explicit DatasetReader(const std::filesystem::path& path);

  const DatasetHeader& header() const { return header_; }
  /// False once all `count` records were read.
  bool next(Record& out);
  std::uint64_t position() const { return index_; }

 private:
  std::filesystem::path path_;
  std::ifstream is_;
  DatasetHeader header_;
  std::uint64_t index_ = 0;
};

DatasetHeader read_header(const std::filesystem::path& path);

/// Contiguous copy of a whole split, for training and evaluation.
struct InMemoryDataset {
  DatasetHeader header;
  std::vector<float> inputs;  // count x 2 x n_s
  std::vector<float> labels;  // count x 2 x n_s
  std::vector<std::vector<bool>> occupancy;

  std::size_t size() const { return occupancy.size(); }
  std::size_t n_s() const { return header.n_s; }
  const float* input(std::size_t i) const { return inputs.data() + i * 2 * n_s(); }
  const float* label(std::size_t i) const { return labels.data() + i * 2 * n_s(); }
};

InMemoryDataset load_dataset(const std::filesystem::path& path);

double denormalize(double x, const DatasetHeader& header);

/// Physical-scale complex spectrum from a normalized two-channel record field.
ComplexVec to_physical(const float* channels, std::size_t n_s, const DatasetHeader& header);

}  // namespace thz::dataset

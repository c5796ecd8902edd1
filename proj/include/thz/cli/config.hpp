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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "thz/baseline/omp.hpp"
#include "thz/crnet/model.hpp"
#include "thz/dataset/dataset.hpp"
#include "thz/signal/generator.hpp"

namespace thz::cli {

struct GridCell {
  double snr_db = 30.0;
  double rate = 0.5;

  friend bool operator==(const GridCell&, const GridCell&) = default;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::filesystem::path out = "runs/default";
  std::vector<GridCell> cells{{30.0, 0.5}};
  std::vector<std::string> methods{"crnet", "omp"};
  signal::GenConfig generation;
  dataset::SplitCounts counts;
  crnet::CrnetConfig crnet;
  baseline::OmpConfig omp;
  double threshold_fraction = 0.05;

  /// Distinct SNRs of the grid, in first-appearance order.
  std::vector<double> snrs() const;
  void validate() const;
};

/// Grid may be given as {"snr_db": [...], "rates": [...]} (cross product) or
/// as {"cells": [{"snr_db": s, "rate": r}, ...]}. Relative paths resolve
/// against `base_dir`. Missing keys keep their defaults.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// "30", "22.5", "-5", "inf".
std::string snr_tag(double snr_db);
std::string cell_tag(const GridCell& cell);

std::filesystem::path data_dir(const ExperimentConfig& cfg, double snr_db);
std::filesystem::path model_path(const ExperimentConfig& cfg, const GridCell& cell);
std::filesystem::path history_path(const ExperimentConfig& cfg, const GridCell& cell);
std::filesystem::path metrics_path(const ExperimentConfig& cfg);

/// Seeds for everything a cell needs, derived from the master seed and the
/// cell's values (not its position), so filtering the grid changes nothing.
std::uint64_t dataset_seed(const ExperimentConfig& cfg, double snr_db);
std::uint64_t model_seed(const ExperimentConfig& cfg, const GridCell& cell);
std::uint64_t shuffle_seed(const ExperimentConfig& cfg, const GridCell& cell);
std::uint64_t omp_matrix_seed(const ExperimentConfig& cfg, const GridCell& cell);

}  // namespace thz::cli

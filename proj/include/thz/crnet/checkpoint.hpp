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
#include <filesystem>
#include <optional>
#include <vector>

#include "thz/crnet/train.hpp"

namespace thz::crnet {

/// Everything needed to resume training bit-exactly.
struct Checkpoint {
  CrnetModel<float> model;
  ad::AdamConfig adam_config;
  std::size_t adam_steps = 0;
  std::vector<std::vector<float>> adam_m;
  std::vector<std::vector<float>> adam_v;
  std::size_t epochs_completed = 0;
  std::uint64_t shuffle_seed = 0;
  std::vector<EpochRecord> history;
};

/// Model parameters, batch-norm running statistics, normalization constants,
/// and (when `trainer` is given) the Adam state and epoch counter, in the CRN1
/// container.
void save_checkpoint(const std::filesystem::path& path, CrnetModel<float>& model,
                     const Trainer* trainer = nullptr, std::uint64_t shuffle_seed = 0);

Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Rebuild a Trainer over `ckpt.model` with the saved optimizer state.
void restore_trainer(const Checkpoint& ckpt, Trainer& trainer);

}  // namespace thz::crnet

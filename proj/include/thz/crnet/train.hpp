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
#include <functional>
#include <vector>

#include "thz/autodiff/adam.hpp"
#include "thz/crnet/model.hpp"
#include "thz/dataset/dataset.hpp"

namespace thz::crnet {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainOptions {
  std::size_t epochs = 20;  // total, including epochs already completed
  std::size_t batch_size = 128;
  std::uint64_t shuffle_seed = 1;
  /// Called after every epoch with the model in eval mode.
  std::function<void(const EpochRecord&, CrnetModel<float>&)> on_epoch_end;
};

/// Mini-batch Adam on the mean squared reconstruction error. All three
/// parameter groups are updated by the same optimizer step. Epoch e shuffles
/// with an rng derived from (shuffle_seed, e), so a run resumed from a
/// checkpoint replays exactly the batches of an uninterrupted run.
class Trainer {
 public:
  Trainer(CrnetModel<float>& model, ad::AdamConfig adam);

  /// One optimizer step on `batch` consecutive samples; returns the batch loss.
  double train_step(const float* inputs, const float* labels, std::size_t batch);

  /// Eval-mode mean loss over a whole split.
  double evaluate_loss(const dataset::InMemoryDataset& data, std::size_t batch_size = 128);

  /// Runs epochs (epochs_completed, opts.epochs]; returns their records.
  std::vector<EpochRecord> fit(const dataset::InMemoryDataset& train,
                               const dataset::InMemoryDataset& val, const TrainOptions& opts);

  ad::Adam<float>& optimizer() { return adam_; }
  const ad::Adam<float>& optimizer() const { return adam_; }
  std::size_t epochs_completed() const { return epochs_completed_; }
  void set_epochs_completed(std::size_t e) { epochs_completed_ = e; }
  const std::vector<EpochRecord>& history() const { return history_; }
  void set_history(std::vector<EpochRecord> h) { history_ = std::move(h); }

 private:
  CrnetModel<float>& model_;
  ad::Adam<float> adam_;
  std::size_t epochs_completed_ = 0;
  std::size_t current_epoch_ = 0;
  std::size_t current_batch_ = 0;
  std::vector<EpochRecord> history_;
};

/// Start the model's output at the mean and spread of the training labels.
void init_from_labels(CrnetModel<float>& model, const dataset::InMemoryDataset& train);

/// epoch,train_loss,val_loss with a header row.
void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history);

}  // namespace thz::crnet

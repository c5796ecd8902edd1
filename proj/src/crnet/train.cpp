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

#include "thz/crnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "thz/common/errors.hpp"
#include "thz/common/random.hpp"

namespace thz::crnet {

using ad::Shape;
using ad::Tape;
using ad::Tensor;
using ad::Var;

namespace {
constexpr std::uint64_t kShuffleStream = 0x5348554646ull;
}

Trainer::Trainer(CrnetModel<float>& model, ad::AdamConfig adam) : model_(model), adam_(adam) {}

double Trainer::train_step(const float* inputs, const float* labels, std::size_t batch) {
  const std::size_t n_s = model_.config().n_s;
  const std::size_t count = batch * 2 * n_s;
  model_.set_training(true);
  model_.zero_grad();

  Tape<float> tape;
  const Var x = tape.constant(Tensor<float>(Shape{batch, 2, n_s}, std::vector<float>(inputs, inputs + count)));
  const Var target = tape.constant(Tensor<float>(Shape{batch, 2, n_s}, std::vector<float>(labels, labels + count)));
  const Var loss = ad::mse_loss(tape, model_.forward(tape, x), target);
  const double value = static_cast<double>(tape.value(loss)[0]);
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-finite training loss at epoch " << current_epoch_ << ", batch " << current_batch_
        << " (lr " << adam_.config().lr << ")";
    throw NumericalError(msg.str());
  }
  tape.backward(loss);
  const auto params = model_.parameters();
  adam_.step(params);
  return value;
}

double Trainer::evaluate_loss(const dataset::InMemoryDataset& data, std::size_t batch_size) {
  const std::size_t n_s = model_.config().n_s;
  if (data.n_s() != n_s) {
    throw ShapeError("dataset n_s " + std::to_string(data.n_s()) + " does not match model n_s " +
                     std::to_string(n_s));
  }
  double sum = 0.0;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    const std::size_t b = std::min(batch_size, data.size() - start);
    const std::size_t count = b * 2 * n_s;
    Tensor<float> x(Shape{b, 2, n_s}, std::vector<float>(data.input(start), data.input(start) + count));
    const Tensor<float> y = infer(model_, x);
    const float* label = data.label(start);
    for (std::size_t i = 0; i < count; ++i) {
      const double d = static_cast<double>(y[i]) - static_cast<double>(label[i]);
      sum += d * d;
    }
  }
  return sum / static_cast<double>(data.size() * 2 * n_s);
}

std::vector<EpochRecord> Trainer::fit(const dataset::InMemoryDataset& train,
                                      const dataset::InMemoryDataset& val, const TrainOptions& opts) {
  const std::size_t n_s = model_.config().n_s;
  if (train.n_s() != n_s || val.n_s() != n_s) {
    throw ShapeError("dataset n_s does not match model n_s " + std::to_string(n_s));
  }
  if (train.size() == 0 || val.size() == 0) throw ConfigError("train: empty split");
  if (opts.batch_size == 0 || opts.batch_size > train.size()) {
    throw ConfigError("train: batch_size must be in [1, " + std::to_string(train.size()) + "]");
  }

  std::vector<EpochRecord> records;
  const std::size_t row = 2 * n_s;
  std::vector<float> xb, yb;
  std::vector<std::size_t> order(train.size());

  for (std::size_t epoch = epochs_completed_ + 1; epoch <= opts.epochs; ++epoch) {
    current_epoch_ = epoch;
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(opts.shuffle_seed, kShuffleStream, epoch);
    std::shuffle(order.begin(), order.end(), rng);

    double weighted = 0.0;
    current_batch_ = 0;
    for (std::size_t start = 0; start < order.size(); start += opts.batch_size, ++current_batch_) {
      const std::size_t b = std::min(opts.batch_size, order.size() - start);
      xb.resize(b * row);
      yb.resize(b * row);
      for (std::size_t k = 0; k < b; ++k) {
        std::copy_n(train.input(order[start + k]), row, xb.data() + k * row);
        std::copy_n(train.label(order[start + k]), row, yb.data() + k * row);
      }
      weighted += train_step(xb.data(), yb.data(), b) * static_cast<double>(b);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = weighted / static_cast<double>(train.size());
    rec.val_loss = evaluate_loss(val, opts.batch_size);
    if (!std::isfinite(rec.val_loss)) {
      throw NumericalError("non-finite validation loss after epoch " + std::to_string(epoch));
    }
    epochs_completed_ = epoch;
    history_.push_back(rec);
    records.push_back(rec);
    if (opts.on_epoch_end) {
      model_.set_training(false);
      opts.on_epoch_end(rec, model_);
    }
  }
  model_.set_training(false);
  return records;
}

void init_from_labels(CrnetModel<float>& model, const dataset::InMemoryDataset& train) {
  const std::vector<float>& y = train.labels;
  if (y.empty()) throw ConfigError("crnet: empty training set");
  double sum = 0.0;
  for (float v : y) sum += v;
  const double mean = sum / static_cast<double>(y.size());
  double ss = 0.0;
  for (float v : y) ss += (v - mean) * (v - mean);
  model.init_output_statistics(mean, std::sqrt(ss / static_cast<double>(y.size())));
}

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "epoch,train_loss,val_loss\n" << std::setprecision(10);
  for (const EpochRecord& r : history) os << r.epoch << ',' << r.train_loss << ',' << r.val_loss << '\n';
  if (!os) throw IoError("write failed for " + path.string());
}

}  // namespace thz::crnet

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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "thz/autodiff/layers.hpp"
#include "thz/common/complex.hpp"
#include "thz/common/normalization.hpp"

namespace thz::crnet {

struct CrnetConfig {
  std::size_t n_s = 256;
  std::size_t n_m = 128;
  std::size_t residual_blocks = 6;
  std::array<std::size_t, 3> block_filters{64, 32, 2};
  std::size_t kernel_size = 3;
  double lr = 0.0005;
  std::size_t epochs = 20;
  std::size_t batch_size = 128;
  std::uint64_t seed = 1;
  /// Start each residual block with a zero gamma on its last batch norm so
  /// the fine module begins as the identity. Init only, not serialized.
  bool zero_init_residual = true;

  /// n_m = round(rate * n_s), at least 1.
  static std::size_t measurements_for_rate(std::size_t n_s, double rate);
  double compression_rate() const { return static_cast<double>(n_m) / static_cast<double>(n_s); }
  void validate() const;
};

/// conv -> batch norm -> PReLU.
template <typename T>
struct ConvStage {
  ad::Conv1dLayer<T> conv;
  ad::BatchNorm1dLayer<T> bn;
  ad::PReluLayer<T> act;

  ad::Var forward(ad::Tape<T>& tape, ad::Var x);
};

/// Three conv stages with an identity skip from block input to block output.
template <typename T>
struct ResidualBlock {
  std::vector<ConvStage<T>> stages;

  ad::Var forward(ad::Tape<T>& tape, ad::Var x);
};

/// Compression -> coarse reconstruction -> fine reconstruction.
///
/// Spectra enter as (batch, 2, n_s) with the real part in channel 0 and the
/// imaginary part in channel 1. The compression layer is a single bias-free
/// full-width filter bank of n_m real rows that is applied to each channel on
/// its own, so its weights are exactly a real n_m x n_s sensing matrix. The
/// coarse layer mirrors it with n_s rows of width n_m, followed by batch norm
/// and PReLU over the two channels. The fine module stacks residual blocks of
/// same-padded convolutions.
template <typename T>
class CrnetModel {
 public:
  CrnetModel() = default;
  CrnetModel(const CrnetConfig& cfg, std::uint64_t init_seed);

  ad::Var forward(ad::Tape<T>& tape, ad::Var x);
  /// (batch, 2, n_s) -> (batch, 2, n_m), linear.
  ad::Var compress(ad::Tape<T>& tape, ad::Var x);
  /// (batch, 2, n_m) -> (batch, 2, n_s).
  ad::Var coarse_reconstruct(ad::Tape<T>& tape, ad::Var z);
  ad::Var fine_reconstruct(ad::Tape<T>& tape, ad::Var y);

  void set_training(bool training);
  bool training() const { return training_; }

  /// Trainable parameters in a fixed order: compression, coarse, fine.
  std::vector<ad::Parameter<T>*> parameters();
  std::vector<ad::BatchNorm1dLayer<T>*> batch_norms();
  std::size_t count_params() const;
  void zero_grad();

  const CrnetConfig& config() const { return cfg_; }
  ad::Conv1dLayer<T>& compression_layer() { return compression_; }
  const ad::Conv1dLayer<T>& compression_layer() const { return compression_; }
  ConvStage<T>& coarse_stage() { return coarse_; }
  std::vector<ResidualBlock<T>>& fine_blocks() { return fine_; }

  /// Set the coarse batch-norm affine so the initial output has the given
  /// per-entry mean and spread (label statistics, normalized scale).
  void init_output_statistics(double mean, double stddev);

  /// Physical-scale constants of the data the model was trained on.
  std::optional<Normalization> normalization;

 private:
  CrnetConfig cfg_{};
  ad::Conv1dLayer<T> compression_;
  ConvStage<T> coarse_;
  std::vector<ResidualBlock<T>> fine_;
  bool training_ = true;
};

/// Closed-form trainable-parameter count for a configuration.
std::size_t expected_param_count(const CrnetConfig& cfg);

/// Pack complex spectra into a (batch, 2, n) tensor (real, imag channels),
/// applying `norm` when given.
template <typename T>
ad::Tensor<T> to_channels(const std::vector<ComplexVec>& spectra,
                          const std::optional<Normalization>& norm = std::nullopt);

template <typename T>
std::vector<ComplexVec> from_channels(const ad::Tensor<T>& t,
                                      const std::optional<Normalization>& norm = std::nullopt);

/// Eval-mode inference on physical-scale noisy spectra; returns physical-scale
/// reconstructions. Requires model.normalization. Processes `chunk` spectra
/// per forward pass.
std::vector<ComplexVec> reconstruct_batch(CrnetModel<float>& model,
                                          const std::vector<ComplexVec>& noisy,
                                          std::size_t chunk = 64);
ComplexVec reconstruct(CrnetModel<float>& model, const ComplexVec& noisy);

/// Eval-mode forward on already-normalized (batch, 2, n_s) data.
template <typename T>
ad::Tensor<T> infer(CrnetModel<T>& model, const ad::Tensor<T>& x);

extern template class CrnetModel<float>;
extern template class CrnetModel<double>;

}  // namespace thz::crnet

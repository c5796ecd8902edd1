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
#include <string>
#include <vector>

#include "thz/autodiff/ops.hpp"
#include "thz/common/random.hpp"

namespace thz::ad {

struct Conv1dConfig {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_size = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;
  bool bias = false;

  /// Odd kernel, stride 1, zero padding that preserves the input length.
  static Conv1dConfig same(std::size_t in, std::size_t out, std::size_t kernel);
  /// One filter spans the whole input: kernel = length, no padding, no bias.
  /// Each filter is then one dense row applied to the input.
  static Conv1dConfig full_width(std::size_t length, std::size_t filters);

  void validate() const;
};

template <typename T>
class Conv1dLayer {
 public:
  Conv1dLayer() = default;
  Conv1dLayer(const std::string& name, const Conv1dConfig& cfg);

  /// Uniform in +-sqrt(6 / fan_in), fan_in = in_channels * kernel_size.
  void init_uniform(Rng& rng);

  Var forward(Tape<T>& tape, Var x);

  const Conv1dConfig& config() const { return cfg_; }
  Parameter<T>& weight() { return weight_; }
  const Parameter<T>& weight() const { return weight_; }
  bool has_bias() const { return cfg_.bias; }
  Parameter<T>& bias() { return bias_; }

  void collect(std::vector<Parameter<T>*>& out);

 private:
  Conv1dConfig cfg_{};
  Parameter<T> weight_;
  Parameter<T> bias_;
};

template <typename T>
class BatchNorm1dLayer {
 public:
  BatchNorm1dLayer() = default;
  BatchNorm1dLayer(const std::string& name, std::size_t channels, double momentum = 0.9,
                   double eps = 1e-5);

  Var forward(Tape<T>& tape, Var x);

  void set_training(bool training) { training_ = training; }
  bool training() const { return training_; }

  Parameter<T>& gamma() { return gamma_; }
  Parameter<T>& beta() { return beta_; }
  BatchNormStats<T>& stats() { return stats_; }
  const BatchNormStats<T>& stats() const { return stats_; }
  std::size_t channels() const { return gamma_.value.size(); }

  void collect(std::vector<Parameter<T>*>& out);

 private:
  Parameter<T> gamma_;
  Parameter<T> beta_;
  BatchNormStats<T> stats_;
  double momentum_ = 0.9;
  double eps_ = 1e-5;
  bool training_ = true;
};

template <typename T>
class PReluLayer {
 public:
  PReluLayer() = default;
  PReluLayer(const std::string& name, std::size_t channels, T init_slope = T(0.25));

  Var forward(Tape<T>& tape, Var x);

  Parameter<T>& slope() { return slope_; }
  void collect(std::vector<Parameter<T>*>& out);

 private:
  Parameter<T> slope_;
};

extern template class Conv1dLayer<float>;
extern template class Conv1dLayer<double>;
extern template class BatchNorm1dLayer<float>;
extern template class BatchNorm1dLayer<double>;
extern template class PReluLayer<float>;
extern template class PReluLayer<double>;

}  // namespace thz::ad

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

#include "thz/autodiff/layers.hpp"

#include <cmath>

#include "thz/common/errors.hpp"

namespace thz::ad {

Conv1dConfig Conv1dConfig::same(std::size_t in, std::size_t out, std::size_t kernel) {
  if (kernel % 2 == 0) throw ConfigError("same-padding convolution needs an odd kernel size");
  return Conv1dConfig{in, out, kernel, 1, kernel / 2, false};
}

Conv1dConfig Conv1dConfig::full_width(std::size_t length, std::size_t filters) {
  return Conv1dConfig{1, filters, length, 1, 0, false};
}

void Conv1dConfig::validate() const {
  if (in_channels == 0 || out_channels == 0 || kernel_size == 0) {
    throw ConfigError("conv1d: channel counts and kernel size must be >= 1");
  }
  if (stride == 0) throw ConfigError("conv1d: stride must be >= 1");
}

template <typename T>
Conv1dLayer<T>::Conv1dLayer(const std::string& name, const Conv1dConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  weight_ = Parameter<T>(name + ".weight",
                         Tensor<T>(Shape{cfg.out_channels, cfg.in_channels, cfg.kernel_size}));
  if (cfg.bias) bias_ = Parameter<T>(name + ".bias", Tensor<T>(Shape{1, cfg.out_channels, 1}));
}

template <typename T>
void Conv1dLayer<T>::init_uniform(Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(cfg_.in_channels * cfg_.kernel_size));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (T& w : weight_.value.values()) w = static_cast<T>(dist(rng));
  if (cfg_.bias) bias_.value.fill(T{0});
}

template <typename T>
Var Conv1dLayer<T>::forward(Tape<T>& tape, Var x) {
  const Var w = tape.parameter(weight_);
  std::optional<Var> b;
  if (cfg_.bias) b = tape.parameter(bias_);
  return conv1d(tape, x, w, b, ConvGeometry{cfg_.stride, cfg_.padding});
}

template <typename T>
void Conv1dLayer<T>::collect(std::vector<Parameter<T>*>& out) {
  out.push_back(&weight_);
  if (cfg_.bias) out.push_back(&bias_);
}

template <typename T>
BatchNorm1dLayer<T>::BatchNorm1dLayer(const std::string& name, std::size_t channels,
                                      double momentum, double eps)
    : gamma_(name + ".gamma", Tensor<T>(Shape{1, channels, 1}, T{1})),
      beta_(name + ".beta", Tensor<T>(Shape{1, channels, 1}, T{0})),
      momentum_(momentum),
      eps_(eps) {
  if (!(momentum > 0.0 && momentum < 1.0)) throw ConfigError("batch_norm: momentum must be in (0, 1)");
  if (!(eps > 0.0)) throw ConfigError("batch_norm: eps must be positive");
  stats_.running_mean.assign(channels, T{0});
  stats_.running_var.assign(channels, T{1});
}

template <typename T>
Var BatchNorm1dLayer<T>::forward(Tape<T>& tape, Var x) {
  const Var g = tape.parameter(gamma_);
  const Var b = tape.parameter(beta_);
  return batch_norm(tape, x, g, b, stats_, BatchNormOptions{training_, momentum_, eps_});
}

template <typename T>
void BatchNorm1dLayer<T>::collect(std::vector<Parameter<T>*>& out) {
  out.push_back(&gamma_);
  out.push_back(&beta_);
}

template <typename T>
PReluLayer<T>::PReluLayer(const std::string& name, std::size_t channels, T init_slope)
    : slope_(name + ".slope", Tensor<T>(Shape{1, channels, 1}, init_slope)) {}

template <typename T>
Var PReluLayer<T>::forward(Tape<T>& tape, Var x) {
  return prelu(tape, x, tape.parameter(slope_));
}

template <typename T>
void PReluLayer<T>::collect(std::vector<Parameter<T>*>& out) {
  out.push_back(&slope_);
}

template class Conv1dLayer<float>;
template class Conv1dLayer<double>;
template class BatchNorm1dLayer<float>;
template class BatchNorm1dLayer<double>;
template class PReluLayer<float>;
template class PReluLayer<double>;

}  // namespace thz::ad

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

#include "thz/crnet/model.hpp"

#include <algorithm>
#include <cmath>

#include "thz/common/errors.hpp"
#include "thz/common/random.hpp"

namespace thz::crnet {

using ad::Shape;
using ad::Tape;
using ad::Tensor;
using ad::Var;

std::size_t CrnetConfig::measurements_for_rate(std::size_t n_s, double rate) {
  if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("compression rate must lie in (0, 1]");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(rate * static_cast<double>(n_s))));
}

void CrnetConfig::validate() const {
  if (n_s < 2) throw ConfigError("crnet: n_s must be >= 2");
  if (n_m == 0 || n_m >= n_s) {
    throw ConfigError("crnet: need 0 < n_m < n_s, got n_m=" + std::to_string(n_m) +
                      " n_s=" + std::to_string(n_s));
  }
  if (block_filters[2] != 2) {
    throw ConfigError("crnet: last residual filter count must be 2 to match the real/imag channels");
  }
  if (block_filters[0] == 0 || block_filters[1] == 0) throw ConfigError("crnet: filter counts must be >= 1");
  if (kernel_size == 0 || kernel_size % 2 == 0) throw ConfigError("crnet: kernel_size must be odd");
  if (kernel_size > n_s) throw ConfigError("crnet: kernel_size exceeds n_s");
  if (!(lr > 0.0)) throw ConfigError("crnet: learning rate must be positive");
  if (epochs == 0 || batch_size == 0) throw ConfigError("crnet: epochs and batch_size must be >= 1");
}

template <typename T>
Var ConvStage<T>::forward(Tape<T>& tape, Var x) {
  return act.forward(tape, bn.forward(tape, conv.forward(tape, x)));
}

template <typename T>
Var ResidualBlock<T>::forward(Tape<T>& tape, Var x) {
  Var y = x;
  for (ConvStage<T>& s : stages) y = s.forward(tape, y);
  return ad::add(tape, x, y);
}

template <typename T>
CrnetModel<T>::CrnetModel(const CrnetConfig& cfg, std::uint64_t init_seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(init_seed);

  compression_ = ad::Conv1dLayer<T>("compression", ad::Conv1dConfig::full_width(cfg.n_s, cfg.n_m));
  compression_.init_uniform(rng);

  coarse_.conv = ad::Conv1dLayer<T>("coarse.conv", ad::Conv1dConfig::full_width(cfg.n_m, cfg.n_s));
  coarse_.conv.init_uniform(rng);
  coarse_.bn = ad::BatchNorm1dLayer<T>("coarse.bn", 2);
  coarse_.act = ad::PReluLayer<T>("coarse.prelu", 2);

  for (std::size_t b = 0; b < cfg.residual_blocks; ++b) {
    ResidualBlock<T> block;
    std::size_t in = 2;
    for (std::size_t s = 0; s < cfg.block_filters.size(); ++s) {
      const std::size_t out = cfg.block_filters[s];
      const std::string name = "fine." + std::to_string(b) + "." + std::to_string(s);
      ConvStage<T> stage;
      stage.conv = ad::Conv1dLayer<T>(name + ".conv", ad::Conv1dConfig::same(in, out, cfg.kernel_size));
      stage.conv.init_uniform(rng);
      stage.bn = ad::BatchNorm1dLayer<T>(name + ".bn", out);
      stage.act = ad::PReluLayer<T>(name + ".prelu", out);
      block.stages.push_back(std::move(stage));
      in = out;
    }
    if (cfg.zero_init_residual) block.stages.back().bn.gamma().value.fill(T(0));
    fine_.push_back(std::move(block));
  }
}

template <typename T>
void CrnetModel<T>::init_output_statistics(double mean, double stddev) {
  if (!(stddev > 0.0) || !std::isfinite(mean) || !std::isfinite(stddev)) {
    throw DomainError("crnet: output statistics need finite mean and positive spread");
  }
  coarse_.bn.gamma().value.fill(static_cast<T>(stddev));
  coarse_.bn.beta().value.fill(static_cast<T>(mean));
}

template <typename T>
Var CrnetModel<T>::compress(Tape<T>& tape, Var x) {
  const Shape s = tape.value(x).shape();
  if (s.channels != 2 || s.length != cfg_.n_s) {
    throw ShapeError("crnet: expected input (batch, 2, " + std::to_string(cfg_.n_s) + "), got " +
                     s.str());
  }
  // Each real/imag channel becomes its own row for the shared filter bank.
  const Var rows = ad::reshape(tape, x, Shape{2 * s.batch, 1, cfg_.n_s});
  const Var z = compression_.forward(tape, rows);  // (2B, n_m, 1)
  return ad::reshape(tape, z, Shape{s.batch, 2, cfg_.n_m});
}

template <typename T>
Var CrnetModel<T>::coarse_reconstruct(Tape<T>& tape, Var z) {
  const Shape s = tape.value(z).shape();
  if (s.channels != 2 || s.length != cfg_.n_m) {
    throw ShapeError("crnet: expected measurements (batch, 2, " + std::to_string(cfg_.n_m) +
                     "), got " + s.str());
  }
  const Var rows = ad::reshape(tape, z, Shape{2 * s.batch, 1, cfg_.n_m});
  const Var y = coarse_.conv.forward(tape, rows);  // (2B, n_s, 1)
  const Var y2 = ad::reshape(tape, y, Shape{s.batch, 2, cfg_.n_s});
  return coarse_.act.forward(tape, coarse_.bn.forward(tape, y2));
}

template <typename T>
Var CrnetModel<T>::fine_reconstruct(Tape<T>& tape, Var y) {
  for (ResidualBlock<T>& block : fine_) y = block.forward(tape, y);
  return y;
}

template <typename T>
Var CrnetModel<T>::forward(Tape<T>& tape, Var x) {
  return fine_reconstruct(tape, coarse_reconstruct(tape, compress(tape, x)));
}

template <typename T>
void CrnetModel<T>::set_training(bool training) {
  training_ = training;
  for (ad::BatchNorm1dLayer<T>* bn : batch_norms()) bn->set_training(training);
}

template <typename T>
std::vector<ad::Parameter<T>*> CrnetModel<T>::parameters() {
  std::vector<ad::Parameter<T>*> out;
  compression_.collect(out);
  coarse_.conv.collect(out);
  coarse_.bn.collect(out);
  coarse_.act.collect(out);
  for (ResidualBlock<T>& block : fine_)
    for (ConvStage<T>& s : block.stages) {
      s.conv.collect(out);
      s.bn.collect(out);
      s.act.collect(out);
    }
  return out;
}

template <typename T>
std::vector<ad::BatchNorm1dLayer<T>*> CrnetModel<T>::batch_norms() {
  std::vector<ad::BatchNorm1dLayer<T>*> out{&coarse_.bn};
  for (ResidualBlock<T>& block : fine_)
    for (ConvStage<T>& s : block.stages) out.push_back(&s.bn);
  return out;
}

template <typename T>
std::size_t CrnetModel<T>::count_params() const {
  std::size_t n = 0;
  for (ad::Parameter<T>* p : const_cast<CrnetModel*>(this)->parameters()) n += p->value.size();
  return n;
}

template <typename T>
void CrnetModel<T>::zero_grad() {
  for (ad::Parameter<T>* p : parameters()) p->zero_grad();
}

std::size_t expected_param_count(const CrnetConfig& cfg) {
  const std::size_t compression = cfg.n_m * cfg.n_s;
  const std::size_t coarse = cfg.n_s * cfg.n_m + 2 * 2 + 2;
  std::size_t block = 0;
  std::size_t in = 2;
  for (std::size_t out : cfg.block_filters) {
    block += in * out * cfg.kernel_size  // conv weights
             + 2 * out                   // batch-norm gamma, beta
             + out;                      // PReLU slopes
    in = out;
  }
  return compression + coarse + cfg.residual_blocks * block;
}

template <typename T>
Tensor<T> to_channels(const std::vector<ComplexVec>& spectra, const std::optional<Normalization>& norm) {
  if (spectra.empty()) throw ShapeError("to_channels: empty batch");
  const std::size_t n = spectra.front().size();
  Tensor<T> t(Shape{spectra.size(), 2, n});
  for (std::size_t b = 0; b < spectra.size(); ++b) {
    if (spectra[b].size() != n) throw ShapeError("to_channels: ragged batch");
    for (std::size_t i = 0; i < n; ++i) {
      double re = spectra[b][i].real();
      double im = spectra[b][i].imag();
      if (norm) {
        re = norm->normalize(re);
        im = norm->normalize(im);
      }
      t.at(b, 0, i) = static_cast<T>(re);
      t.at(b, 1, i) = static_cast<T>(im);
    }
  }
  return t;
}

template <typename T>
std::vector<ComplexVec> from_channels(const Tensor<T>& t, const std::optional<Normalization>& norm) {
  const Shape s = t.shape();
  if (s.channels != 2) throw ShapeError("from_channels: expected 2 channels, got " + s.str());
  std::vector<ComplexVec> out(s.batch, ComplexVec(s.length));
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t i = 0; i < s.length; ++i) {
      double re = static_cast<double>(t.at(b, 0, i));
      double im = static_cast<double>(t.at(b, 1, i));
      if (norm) {
        re = norm->denormalize(re);
        im = norm->denormalize(im);
      }
      out[b][i] = Complex(re, im);
    }
  return out;
}

template <typename T>
Tensor<T> infer(CrnetModel<T>& model, const Tensor<T>& x) {
  const bool was_training = model.training();
  model.set_training(false);
  try {
    auto tape = Tape<T>::no_grad();
    const Var y = model.forward(tape, tape.constant(x));
    Tensor<T> out = tape.value(y);
    model.set_training(was_training);
    return out;
  } catch (...) {
    model.set_training(was_training);
    throw;
  }
}

std::vector<ComplexVec> reconstruct_batch(CrnetModel<float>& model, const std::vector<ComplexVec>& noisy,
                                          std::size_t chunk) {
  if (!model.normalization) {
    throw ConfigError("reconstruct: model carries no normalization constants");
  }
  std::vector<ComplexVec> out;
  out.reserve(noisy.size());
  chunk = std::max<std::size_t>(chunk, 1);
  for (std::size_t start = 0; start < noisy.size(); start += chunk) {
    const std::size_t stop = std::min(noisy.size(), start + chunk);
    std::vector<ComplexVec> part(noisy.begin() + static_cast<std::ptrdiff_t>(start),
                                 noisy.begin() + static_cast<std::ptrdiff_t>(stop));
    for (const ComplexVec& v : part) {
      if (v.size() != model.config().n_s) {
        throw ShapeError("reconstruct: spectrum length " + std::to_string(v.size()) +
                         " does not match model n_s " + std::to_string(model.config().n_s));
      }
    }
    const Tensor<float> y = infer(model, to_channels<float>(part, model.normalization));
    for (ComplexVec& v : from_channels(y, model.normalization)) out.push_back(std::move(v));
  }
  return out;
}

ComplexVec reconstruct(CrnetModel<float>& model, const ComplexVec& noisy) {
  return reconstruct_batch(model, {noisy}).front();
}

template class CrnetModel<float>;
template class CrnetModel<double>;
template struct ConvStage<float>;
template struct ConvStage<double>;
template struct ResidualBlock<float>;
template struct ResidualBlock<double>;
template Tensor<float> to_channels<float>(const std::vector<ComplexVec>&, const std::optional<Normalization>&);
template Tensor<double> to_channels<double>(const std::vector<ComplexVec>&, const std::optional<Normalization>&);
template std::vector<ComplexVec> from_channels<float>(const Tensor<float>&, const std::optional<Normalization>&);
template std::vector<ComplexVec> from_channels<double>(const Tensor<double>&, const std::optional<Normalization>&);
template Tensor<float> infer<float>(CrnetModel<float>&, const Tensor<float>&);
template Tensor<double> infer<double>(CrnetModel<double>&, const Tensor<double>&);

}  // namespace thz::crnet

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
#include <optional>
#include <vector>

#include "thz/autodiff/tape.hpp"

namespace thz::ad {

struct ConvGeometry {
  std::size_t stride = 1;
  std::size_t padding = 0;
};

/// Output length of a 1-D cross-correlation; throws ShapeError when the
/// kernel does not fit the padded input.
std::size_t conv_output_length(std::size_t length, std::size_t kernel, ConvGeometry geom);

/// 1-D cross-correlation with zero padding.
/// x: (batch, in, length), weight: (out, in, kernel), bias: (1, out, 1).
template <typename T>
Var conv1d(Tape<T>& tape, Var x, Var weight, std::optional<Var> bias, ConvGeometry geom);

/// Running statistics of a batch-norm layer. Lives outside the tape.
template <typename T>
struct BatchNormStats {
  std::vector<T> running_mean;
  std::vector<T> running_var;
  bool initialized = false;
};

struct BatchNormOptions {
  bool training = true;
  double momentum = 0.9;  // running = momentum * running + (1 - momentum) * batch
  double eps = 1e-5;
};

/// Per-channel batch normalization over the batch and length axes.
/// gamma, beta: (1, channels, 1). Training mode normalizes with batch
/// statistics and updates `stats`; eval mode uses `stats` and throws
/// ConfigError if they were never populated.
template <typename T>
Var batch_norm(Tape<T>& tape, Var x, Var gamma, Var beta, BatchNormStats<T>& stats,
               const BatchNormOptions& opts);

/// max(0, x) + slope[c] * min(0, x); slope: (1, channels, 1).
template <typename T>
Var prelu(Tape<T>& tape, Var x, Var slope);

template <typename T>
Var add(Tape<T>& tape, Var a, Var b);

/// Reinterpret the row-major data under a new shape of equal size.
template <typename T>
Var reshape(Tape<T>& tape, Var x, Shape shape);

/// Mean of squared differences over every element; result shape (1, 1, 1).
template <typename T>
Var mse_loss(Tape<T>& tape, Var pred, Var target);

}  // namespace thz::ad

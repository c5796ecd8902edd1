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
#include <functional>
#include <span>
#include <string>

#include "thz/autodiff/tape.hpp"

namespace thz::ad {

struct GradCheckOptions {
  double eps = 1e-5;
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  /// Applied to each analytic gradient before comparison. Fault injection only.
  std::function<double(double)> corrupt;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::string worst;  // "<param>[<flat index>]"
};

/// Compare backprop gradients against central differences on a random sample
/// of parameter entries. `loss_fn` records a forward pass on the given tape and
/// returns the scalar loss. Relative error is
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-12).
template <typename T>
GradCheckResult grad_check(const std::function<Var(Tape<T>&)>& loss_fn,
                           std::span<Parameter<T>* const> params,
                           const GradCheckOptions& opts = {});

}  // namespace thz::ad

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

#include "thz/autodiff/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "thz/common/errors.hpp"
#include "thz/common/random.hpp"

namespace thz::ad {

namespace {

template <typename T>
double eval_loss(const std::function<Var(Tape<T>&)>& loss_fn) {
  Tape<T> tape;
  const Var loss = loss_fn(tape);
  const double value = static_cast<double>(tape.value(loss)[0]);
  if (!std::isfinite(value)) throw NumericalError("grad_check: non-finite loss");
  return value;
}

}  // namespace

template <typename T>
GradCheckResult grad_check(const std::function<Var(Tape<T>&)>& loss_fn,
                           std::span<Parameter<T>* const> params, const GradCheckOptions& opts) {
  if (!(opts.eps >= 1e-6 && opts.eps <= 1e-2)) {
    throw ConfigError("grad_check: eps must lie in [1e-6, 1e-2]");
  }

  for (Parameter<T>* p : params) p->zero_grad();
  {
    Tape<T> tape;
    const Var loss = loss_fn(tape);
    if (!std::isfinite(static_cast<double>(tape.value(loss)[0]))) {
      throw NumericalError("grad_check: non-finite loss");
    }
    tape.backward(loss);
  }

  // (parameter, flat index) pairs, sampled without replacement.
  std::vector<std::pair<std::size_t, std::size_t>> entries;
  for (std::size_t k = 0; k < params.size(); ++k)
    for (std::size_t i = 0; i < params[k]->value.size(); ++i) entries.emplace_back(k, i);
  if (entries.size() > opts.samples) {
    Rng rng(opts.seed);
    std::shuffle(entries.begin(), entries.end(), rng);
    entries.resize(opts.samples);
  }

  GradCheckResult result;
  for (const auto& [k, i] : entries) {
    Parameter<T>& p = *params[k];
    double analytic = static_cast<double>(p.grad[i]);
    if (opts.corrupt) analytic = opts.corrupt(analytic);

    const T original = p.value[i];
    p.value[i] = static_cast<T>(static_cast<double>(original) + opts.eps);
    const double up = eval_loss(loss_fn);
    p.value[i] = static_cast<T>(static_cast<double>(original) - opts.eps);
    const double down = eval_loss(loss_fn);
    p.value[i] = original;

    const double numeric = (up - down) / (2.0 * opts.eps);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
    const double rel = std::abs(analytic - numeric) / denom;
    ++result.checked;
    if (rel >= result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst = p.name + "[" + std::to_string(i) + "]";
    }
  }
  return result;
}

template GradCheckResult grad_check<float>(const std::function<Var(Tape<float>&)>&,
                                           std::span<Parameter<float>* const>,
                                           const GradCheckOptions&);
template GradCheckResult grad_check<double>(const std::function<Var(Tape<double>&)>&,
                                            std::span<Parameter<double>* const>,
                                            const GradCheckOptions&);

}  // namespace thz::ad

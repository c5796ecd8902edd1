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

#include "thz/autodiff/adam.hpp"

#include <cmath>

#include "thz/common/errors.hpp"

namespace thz::ad {

template <typename T>
void Adam<T>::step(std::span<Parameter<T>* const> params) {
  if (m_.empty()) {
    for (const Parameter<T>* p : params) {
      m_.emplace_back(p->value.size(), T{0});
      v_.emplace_back(p->value.size(), T{0});
    }
  }
  if (m_.size() != params.size()) {
    throw ConfigError("adam: parameter list changed size between steps");
  }
  ++step_count_;
  const double t = static_cast<double>(step_count_);
  const T b1 = static_cast<T>(cfg_.beta1);
  const T b2 = static_cast<T>(cfg_.beta2);
  const T c1 = static_cast<T>(1.0 / (1.0 - std::pow(cfg_.beta1, t)));
  const T c2 = static_cast<T>(1.0 / (1.0 - std::pow(cfg_.beta2, t)));
  const T lr = static_cast<T>(cfg_.lr);
  const T eps = static_cast<T>(cfg_.eps);

  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter<T>& p = *params[k];
    auto& m = m_[k];
    auto& v = v_[k];
    if (m.size() != p.value.size() || p.grad.size() != p.value.size()) {
      throw ShapeError("adam: state/gradient size mismatch for " + p.name);
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      const T g = p.grad[i];
      m[i] = b1 * m[i] + (T{1} - b1) * g;
      v[i] = b2 * v[i] + (T{1} - b2) * g * g;
      const T mhat = m[i] * c1;
      const T vhat = v[i] * c2;
      p.value[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

template <typename T>
void Adam<T>::restore(std::size_t step_count, std::vector<std::vector<T>> m,
                      std::vector<std::vector<T>> v) {
  if (m.size() != v.size()) throw ConfigError("adam: moment lists differ in length");
  step_count_ = step_count;
  m_ = std::move(m);
  v_ = std::move(v);
}

template class Adam<float>;
template class Adam<double>;

}  // namespace thz::ad

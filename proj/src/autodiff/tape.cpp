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

#include "thz/autodiff/tape.hpp"

#include <algorithm>

#include "thz/common/errors.hpp"

namespace thz::ad {

template <typename T>
Var Tape<T>::constant(Tensor<T> value) {
  nodes_.push_back(Node{std::move(value), {}, false, nullptr, {}});
  return Var{nodes_.size() - 1};
}

template <typename T>
Var Tape<T>::leaf(Tensor<T> value) {
  nodes_.push_back(Node{std::move(value), {}, grad_enabled_, nullptr, {}});
  return Var{nodes_.size() - 1};
}

template <typename T>
Var Tape<T>::parameter(Parameter<T>& param) {
  nodes_.push_back(Node{param.value, {}, grad_enabled_, grad_enabled_ ? &param : nullptr, {}});
  return Var{nodes_.size() - 1};
}

template <typename T>
Var Tape<T>::record(Tensor<T> value, std::vector<Var> parents, BackwardFn backward) {
  bool needs = std::any_of(parents.begin(), parents.end(),
                           [&](Var p) { return nodes_.at(p.id).requires_grad; });
  nodes_.push_back(Node{std::move(value), {}, needs, nullptr,
                        needs ? std::move(backward) : BackwardFn{}});
  return Var{nodes_.size() - 1};
}

template <typename T>
const Tensor<T>& Tape<T>::grad(Var v) {
  Node& n = nodes_.at(v.id);
  if (n.grad.empty() && n.value.size() > 0) n.grad = Tensor<T>(n.value.shape());
  return n.grad;
}

template <typename T>
Tensor<T>* Tape<T>::grad_buffer(Var parent) {
  Node& n = nodes_.at(parent.id);
  if (!n.requires_grad) return nullptr;
  if (n.grad.empty()) n.grad = Tensor<T>(n.value.shape());
  return &n.grad;
}

template <typename T>
void Tape<T>::backward(Var loss) {
  Node& root = nodes_.at(loss.id);
  if (root.value.size() != 1) {
    throw ShapeError("backward needs a scalar loss, got shape " + root.value.shape().str());
  }
  if (!root.requires_grad) return;
  root.grad = Tensor<T>(root.value.shape(), T{1});

  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.empty()) continue;
    if (n.backward) n.backward(*this, i);
    if (n.param != nullptr) {
      auto& dst = n.param->grad;
      if (dst.shape() != n.grad.shape()) dst = Tensor<T>(n.grad.shape());
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += n.grad[k];
    }
  }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace thz::ad

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
#include <functional>
#include <memory>
#include <vector>

#include "thz/autodiff/tensor.hpp"

namespace thz::ad {

template <typename T>
class Tape;

/// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = 0;
};

/// Append-only record of a forward pass. Nodes are stored in creation order,
/// which is a topological order, so backward is a single reverse sweep.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  /// A tape that records values only: parameters and leaves enter as
  /// constants and no backward closures are kept. For inference.
  static Tape no_grad() {
    Tape t;
    t.grad_enabled_ = false;
    return t;
  }
  Tape(Tape&&) = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Value with no gradient.
  Var constant(Tensor<T> value);
  /// Leaf whose gradient can be read back after backward().
  Var leaf(Tensor<T> value);
  /// Leaf bound to a parameter; backward() adds into `param.grad`.
  Var parameter(Parameter<T>& param);

  /// Record an op result. `requires_grad` is derived from the parents.
  Var record(Tensor<T> value, std::vector<Var> parents, BackwardFn backward);

  const Tensor<T>& value(Var v) const { return nodes_.at(v.id).value; }
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }

  /// Gradient of a node after backward(); zeros if nothing flowed into it.
  const Tensor<T>& grad(Var v);

  /// Output gradient of node `id` (valid inside a BackwardFn).
  const Tensor<T>& grad_at(std::size_t id) const { return nodes_[id].grad; }
  /// Mutable gradient buffer of a parent, allocated as zeros on first use;
  /// nullptr when the parent does not require a gradient.
  Tensor<T>* grad_buffer(Var parent);

  /// Reverse sweep from a scalar loss. Throws ShapeError if `loss` is not a
  /// single element.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    bool requires_grad = false;
    Parameter<T>* param = nullptr;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  bool grad_enabled_ = true;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace thz::ad

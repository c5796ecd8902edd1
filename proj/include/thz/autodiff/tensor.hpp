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
#include <span>
#include <string>
#include <vector>

namespace thz::ad {

/// Three-axis shape. Activations use (batch, channels, length); convolution
/// weights reuse the same axes as (out_channels, in_channels, kernel).
struct Shape {
  std::size_t batch = 0;
  std::size_t channels = 0;
  std::size_t length = 0;

  std::size_t numel() const { return batch * channels * length; }
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T{0});
  Tensor(Shape shape, std::vector<T> data);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at(std::size_t b, std::size_t c, std::size_t l) {
    return data_[(b * shape_.channels + c) * shape_.length + l];
  }
  const T& at(std::size_t b, std::size_t c, std::size_t l) const {
    return data_[(b * shape_.channels + c) * shape_.length + l];
  }

  void fill(T value);
  /// Same data, new shape with equal element count.
  Tensor reshaped(Shape shape) const;

 private:
  Shape shape_{};
  std::vector<T> data_;
};

/// Throws ShapeError naming `what` and both shapes unless a == b.
void require_same_shape(const Shape& a, const Shape& b, const char* what);

/// Trainable tensor with an accumulated gradient of the same shape.
template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Parameter() = default;
  Parameter(std::string n, Tensor<T> v)
      : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

  void zero_grad() { grad.fill(T{0}); }
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace thz::ad

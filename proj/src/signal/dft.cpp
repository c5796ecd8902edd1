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

#include "thz/signal/dft.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "thz/common/errors.hpp"

namespace thz::signal {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// sign = -1 forward, +1 inverse; unnormalized.
ComplexVec transform(const ComplexVec& x, int sign) {
  const std::size_t n = x.size();
  if (n == 0) throw ConfigError("dft: input length must be >= 1");
  const double two_pi = 2.0 * std::numbers::pi;

  if (!is_pow2(n)) {
    ComplexVec out(n);
    for (std::size_t k = 0; k < n; ++k) {
      Complex acc{0.0, 0.0};
      for (std::size_t m = 0; m < n; ++m) {
        const double ang = sign * two_pi * static_cast<double>((k * m) % n) / static_cast<double>(n);
        acc += x[m] * Complex(std::cos(ang), std::sin(ang));
      }
      out[k] = acc;
    }
    return out;
  }

  ComplexVec a = x;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      const double ang = sign * two_pi * static_cast<double>(k) / static_cast<double>(len);
      const Complex w(std::cos(ang), std::sin(ang));
      for (std::size_t i = 0; i < n; i += len) {
        const Complex u = a[i + k];
        const Complex v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
  return a;
}

ComplexVec scaled(ComplexVec v) {
  const double s = 1.0 / std::sqrt(static_cast<double>(v.size()));
  for (Complex& c : v) c *= s;
  return v;
}

}  // namespace

ComplexVec dft(const ComplexVec& x) { return scaled(transform(x, -1)); }

ComplexVec idft(const ComplexVec& X) { return scaled(transform(X, +1)); }

}  // namespace thz::signal

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

#include "thz/common/complex.hpp"

namespace thz::signal {

/// Unitary DFT, X[k] = (1/sqrt(N)) sum_n x[n] exp(-2 pi j k n / N).
/// Radix-2 FFT for power-of-two lengths, direct summation otherwise.
ComplexVec dft(const ComplexVec& x);

/// Unitary inverse, x[n] = (1/sqrt(N)) sum_k X[k] exp(+2 pi j k n / N).
ComplexVec idft(const ComplexVec& X);

}  // namespace thz::signal

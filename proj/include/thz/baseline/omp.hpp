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
#include <vector>

#include "thz/common/complex.hpp"
#include "thz/sensing/sensing.hpp"

namespace thz::baseline {

struct OmpConfig {
  std::size_t max_sparsity = 40;
  double residual_tol = 0.0;  // stop once ||residual|| <= residual_tol
  std::size_t max_iters = 256;
  double ridge = 1e-10;       // added to the normal-equation diagonal
};

struct OmpResult {
  ComplexVec estimate;                 // length n_s, zero off-support
  std::vector<std::size_t> support;    // selection order
  std::vector<double> residual_norms;  // entry 0 is ||z||, then one per iteration
  std::size_t iterations = 0;
  bool rank_deficient = false;
};

/// Orthogonal matching pursuit on an unstructured sensing matrix: pick the
/// column with the largest |Phi^H r|, refit all selected coefficients by
/// least squares, repeat until the residual tolerance, max_sparsity or
/// max_iters is reached.
OmpResult omp_reconstruct(const sensing::SensingMatrix& m, const ComplexVec& z, const OmpConfig& cfg);

}  // namespace thz::baseline

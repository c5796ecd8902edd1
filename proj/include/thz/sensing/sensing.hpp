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
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "thz/common/complex.hpp"
#include "thz/common/random.hpp"
#include "thz/crnet/model.hpp"

namespace thz::sensing {

enum class MatrixKind { Unstructured, LearnedStructured };

/// n_m x n_s compression operator.
///   Unstructured:      complex rows of the unitary IDFT matrix.
///   LearnedStructured: real rows applied to the real and imaginary parts
///                      separately (the CRNet compression filters).
struct SensingMatrix {
  MatrixKind kind = MatrixKind::Unstructured;
  std::size_t n_m = 0;
  std::size_t n_s = 0;
  Eigen::MatrixXcd complex_rows;  // Unstructured
  Eigen::MatrixXd real_rows;      // LearnedStructured
  std::vector<std::size_t> selected_row_indices;  // Unstructured

  double compression_rate() const { return static_cast<double>(n_m) / static_cast<double>(n_s); }
  /// Complex form of either kind (real rows promote to complex).
  Eigen::MatrixXcd as_complex() const;
};

/// Row k of the unitary IDFT: exp(+2 pi j k n / n_s) / sqrt(n_s).
Eigen::RowVectorXcd idft_row(std::size_t n_s, std::size_t k);

/// n_m distinct IDFT rows drawn uniformly without replacement, kept in draw order.
SensingMatrix random_partial_idft(std::size_t n_s, std::size_t n_m, Rng& rng);

SensingMatrix learned_matrix(Eigen::MatrixXd rows);

/// z = Phi x.
ComplexVec compress(const SensingMatrix& m, const ComplexVec& spectrum);

/// Copy of the model's compression filters. compress(export, x) equals the
/// model's compression-layer output on x.
template <typename T>
SensingMatrix export_learned_matrix(const crnet::CrnetModel<T>& model);

/// CRN1 container with a kind tag. Unstructured matrices are stored by their
/// row indices and rebuilt exactly on load.
void save_sensing_matrix(const std::filesystem::path& path, const SensingMatrix& m);
SensingMatrix load_sensing_matrix(const std::filesystem::path& path);

}  // namespace thz::sensing

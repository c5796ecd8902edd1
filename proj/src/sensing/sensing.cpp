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

#include "thz/sensing/sensing.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "thz/autodiff/checkpoint.hpp"
#include "thz/common/errors.hpp"

namespace thz::sensing {

Eigen::MatrixXcd SensingMatrix::as_complex() const {
  if (kind == MatrixKind::Unstructured) return complex_rows;
  return real_rows.cast<Complex>();
}

Eigen::RowVectorXcd idft_row(std::size_t n_s, std::size_t k) {
  Eigen::RowVectorXcd row(static_cast<Eigen::Index>(n_s));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_s));
  for (std::size_t n = 0; n < n_s; ++n) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>((k * n) % n_s) /
                       static_cast<double>(n_s);
    row(static_cast<Eigen::Index>(n)) = std::polar(scale, ang);
  }
  return row;
}

SensingMatrix random_partial_idft(std::size_t n_s, std::size_t n_m, Rng& rng) {
  if (n_m == 0 || n_m > n_s) {
    throw ConfigError("random_partial_idft: need 1 <= n_m <= n_s, got n_m=" + std::to_string(n_m) +
                      " n_s=" + std::to_string(n_s));
  }
  std::vector<std::size_t> pool(n_s);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t j = 0; j < n_m; ++j) {
    std::uniform_int_distribution<std::size_t> pick(j, n_s - 1);
    std::swap(pool[j], pool[pick(rng)]);
  }
  pool.resize(n_m);

  SensingMatrix m;
  m.kind = MatrixKind::Unstructured;
  m.n_m = n_m;
  m.n_s = n_s;
  m.selected_row_indices = pool;
  m.complex_rows.resize(static_cast<Eigen::Index>(n_m), static_cast<Eigen::Index>(n_s));
  for (std::size_t r = 0; r < n_m; ++r) m.complex_rows.row(static_cast<Eigen::Index>(r)) = idft_row(n_s, pool[r]);
  return m;
}

SensingMatrix learned_matrix(Eigen::MatrixXd rows) {
  if (rows.rows() == 0 || rows.rows() > rows.cols()) {
    throw ConfigError("learned sensing matrix needs 1 <= n_m <= n_s");
  }
  SensingMatrix m;
  m.kind = MatrixKind::LearnedStructured;
  m.n_m = static_cast<std::size_t>(rows.rows());
  m.n_s = static_cast<std::size_t>(rows.cols());
  m.real_rows = std::move(rows);
  return m;
}

ComplexVec compress(const SensingMatrix& m, const ComplexVec& spectrum) {
  if (spectrum.size() != m.n_s) {
    throw ShapeError("compress: spectrum length " + std::to_string(spectrum.size()) +
                     " does not match sensing matrix width " + std::to_string(m.n_s));
  }
  const Eigen::Map<const Eigen::VectorXcd> x(spectrum.data(), static_cast<Eigen::Index>(spectrum.size()));
  ComplexVec z(m.n_m);
  Eigen::Map<Eigen::VectorXcd> out(z.data(), static_cast<Eigen::Index>(m.n_m));
  if (m.kind == MatrixKind::Unstructured) {
    out.noalias() = m.complex_rows * x;
  } else {
    const Eigen::VectorXd re = m.real_rows * x.real();
    const Eigen::VectorXd im = m.real_rows * x.imag();
    for (std::size_t i = 0; i < m.n_m; ++i) z[i] = Complex(re(Eigen::Index(i)), im(Eigen::Index(i)));
  }
  return z;
}

template <typename T>
SensingMatrix export_learned_matrix(const crnet::CrnetModel<T>& model) {
  const auto& layer = model.compression_layer();
  const auto& cfg = layer.config();
  const auto& mc = model.config();
  if (cfg.in_channels != 1 || cfg.kernel_size != mc.n_s || cfg.padding != 0 || cfg.stride != 1 ||
      cfg.bias) {
    throw ConfigError("export_learned_matrix: first layer is not a full-width bias-free convolution");
  }
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(cfg.out_channels), static_cast<Eigen::Index>(mc.n_s));
  const auto& w = layer.weight().value;
  for (std::size_t r = 0; r < cfg.out_channels; ++r)
    for (std::size_t c = 0; c < mc.n_s; ++c)
      rows(Eigen::Index(r), Eigen::Index(c)) = static_cast<double>(w.at(r, 0, c));
  return learned_matrix(std::move(rows));
}

template SensingMatrix export_learned_matrix<float>(const crnet::CrnetModel<float>&);
template SensingMatrix export_learned_matrix<double>(const crnet::CrnetModel<double>&);

void save_sensing_matrix(const std::filesystem::path& path, const SensingMatrix& m) {
  std::vector<ad::Blob> blobs;
  const bool learned = m.kind == MatrixKind::LearnedStructured;
  blobs.push_back({"sensing.kind", {1}, {learned ? 1.0f : 0.0f}});
  blobs.push_back({"sensing.size", {2}, {float(m.n_m), float(m.n_s)}});
  if (learned) {
    std::vector<float> data;
    data.reserve(m.n_m * m.n_s);
    for (std::size_t r = 0; r < m.n_m; ++r)
      for (std::size_t c = 0; c < m.n_s; ++c)
        data.push_back(static_cast<float>(m.real_rows(Eigen::Index(r), Eigen::Index(c))));
    blobs.push_back({"sensing.rows", {std::uint32_t(m.n_m), std::uint32_t(m.n_s)}, std::move(data)});
  } else {
    std::vector<float> idx(m.selected_row_indices.begin(), m.selected_row_indices.end());
    blobs.push_back({"sensing.selected_rows", {std::uint32_t(m.n_m)}, std::move(idx)});
  }
  ad::write_container(path, blobs);
}

SensingMatrix load_sensing_matrix(const std::filesystem::path& path) {
  const auto blobs = ad::read_container(path);
  const bool learned = ad::find_blob(blobs, "sensing.kind").data.at(0) != 0.0f;
  const auto& size = ad::find_blob(blobs, "sensing.size").data;
  if (size.size() != 2) throw FormatError(path.string() + ": bad sensing.size blob");
  const auto n_m = static_cast<std::size_t>(size[0]);
  const auto n_s = static_cast<std::size_t>(size[1]);
  if (learned) {
    const auto& rows = ad::find_blob(blobs, "sensing.rows");
    if (rows.data.size() != n_m * n_s) throw FormatError(path.string() + ": sensing.rows has wrong size");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n_m), static_cast<Eigen::Index>(n_s));
    for (std::size_t r = 0; r < n_m; ++r)
      for (std::size_t c = 0; c < n_s; ++c) m(Eigen::Index(r), Eigen::Index(c)) = rows.data[r * n_s + c];
    return learned_matrix(std::move(m));
  }
  const auto& idx = ad::find_blob(blobs, "sensing.selected_rows").data;
  if (idx.size() != n_m) throw FormatError(path.string() + ": sensing.selected_rows has wrong size");
  SensingMatrix m;
  m.kind = MatrixKind::Unstructured;
  m.n_m = n_m;
  m.n_s = n_s;
  m.complex_rows.resize(static_cast<Eigen::Index>(n_m), static_cast<Eigen::Index>(n_s));
  for (std::size_t r = 0; r < n_m; ++r) {
    const auto k = static_cast<std::size_t>(idx[r]);
    if (k >= n_s) throw FormatError(path.string() + ": row index out of range");
    m.selected_row_indices.push_back(k);
    m.complex_rows.row(Eigen::Index(r)) = idft_row(n_s, k);
  }
  return m;
}

}  // namespace thz::sensing

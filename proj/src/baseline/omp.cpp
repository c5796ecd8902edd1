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

#include "thz/baseline/omp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "thz/common/errors.hpp"

namespace thz::baseline {

OmpResult omp_reconstruct(const sensing::SensingMatrix& m, const ComplexVec& z, const OmpConfig& cfg) {
  if (m.kind != sensing::MatrixKind::Unstructured) {
    throw ConfigError("omp_reconstruct: needs an unstructured (partial IDFT) sensing matrix");
  }
  if (z.size() != m.n_m) {
    throw ShapeError("omp_reconstruct: measurement length " + std::to_string(z.size()) +
                     " does not match n_m " + std::to_string(m.n_m));
  }
  if (cfg.max_sparsity > m.n_m) {
    throw ConfigError("omp_reconstruct: max_sparsity " + std::to_string(cfg.max_sparsity) +
                      " exceeds n_m " + std::to_string(m.n_m));
  }
  if (cfg.residual_tol < 0.0) throw ConfigError("omp_reconstruct: residual_tol must be >= 0");

  const Eigen::MatrixXcd& phi = m.complex_rows;
  const Eigen::Map<const Eigen::VectorXcd> y(z.data(), static_cast<Eigen::Index>(z.size()));

  OmpResult res;
  res.estimate.assign(m.n_s, Complex{0.0, 0.0});
  Eigen::VectorXcd residual = y;
  res.residual_norms.push_back(residual.norm());

  std::vector<bool> chosen(m.n_s, false);
  Eigen::VectorXcd coeffs;
  const std::size_t limit = std::min(cfg.max_sparsity, cfg.max_iters);

  while (res.support.size() < limit && res.residual_norms.back() > cfg.residual_tol) {
    const Eigen::VectorXcd corr = phi.adjoint() * residual;
    Eigen::Index best = -1;
    double best_mag = -1.0;
    for (Eigen::Index j = 0; j < corr.size(); ++j) {
      if (chosen[static_cast<std::size_t>(j)]) continue;
      const double mag = std::abs(corr(j));
      if (mag > best_mag) {
        best_mag = mag;
        best = j;
      }
    }
    if (best < 0 || best_mag == 0.0) break;

    std::vector<std::size_t> trial = res.support;
    trial.push_back(static_cast<std::size_t>(best));
    const auto k = static_cast<Eigen::Index>(trial.size());
    Eigen::MatrixXcd a(phi.rows(), k);
    for (Eigen::Index c = 0; c < k; ++c) a.col(c) = phi.col(static_cast<Eigen::Index>(trial[std::size_t(c)]));

    Eigen::MatrixXcd gram = a.adjoint() * a;
    gram.diagonal().array() += cfg.ridge;
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    bool deficient = llt.info() != Eigen::Success;
    if (!deficient) {
      const Eigen::VectorXd d = llt.matrixLLT().diagonal().real();
      const double dmax = d.maxCoeff();
      const double dmin = d.minCoeff();
      deficient = !(dmin > 1e-4 * dmax);  // Gram condition number above ~1e8
    }
    if (deficient) {
      res.rank_deficient = true;
      break;
    }
    coeffs = llt.solve(a.adjoint() * y);
    residual = y - a * coeffs;
    res.support = std::move(trial);
    chosen[static_cast<std::size_t>(best)] = true;
    res.residual_norms.push_back(residual.norm());
    ++res.iterations;
  }

  for (std::size_t i = 0; i < res.support.size(); ++i) res.estimate[res.support[i]] = coeffs(Eigen::Index(i));
  return res;
}

}  // namespace thz::baseline

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
#include <string>
#include <vector>

#include "thz/baseline/omp.hpp"
#include "thz/crnet/model.hpp"
#include "thz/dataset/dataset.hpp"
#include "thz/metrics/metrics.hpp"
#include "thz/sensing/sensing.hpp"

namespace thz::metrics {

/// Maps physical-scale noisy spectra to physical-scale reconstructions.
class Reconstructor {
 public:
  virtual ~Reconstructor() = default;
  virtual std::string name() const = 0;
  virtual std::vector<ComplexVec> reconstruct(const std::vector<ComplexVec>& noisy) = 0;
};

class CrnetReconstructor : public Reconstructor {
 public:
  explicit CrnetReconstructor(crnet::CrnetModel<float>& model) : model_(model) {}
  std::string name() const override { return "crnet"; }
  std::vector<ComplexVec> reconstruct(const std::vector<ComplexVec>& noisy) override;

 private:
  crnet::CrnetModel<float>& model_;
};

/// Compresses with a random partial IDFT matrix, then runs OMP.
class OmpReconstructor : public Reconstructor {
 public:
  OmpReconstructor(sensing::SensingMatrix matrix, baseline::OmpConfig cfg)
      : matrix_(std::move(matrix)), cfg_(cfg) {}
  std::string name() const override { return "omp"; }
  std::vector<ComplexVec> reconstruct(const std::vector<ComplexVec>& noisy) override;

 private:
  sensing::SensingMatrix matrix_;
  baseline::OmpConfig cfg_;
};

/// Returns the clean spectrum itself (upper bound / testing).
class OracleReconstructor : public Reconstructor {
 public:
  explicit OracleReconstructor(std::vector<ComplexVec> clean) : clean_(std::move(clean)) {}
  std::string name() const override { return "oracle"; }
  std::vector<ComplexVec> reconstruct(const std::vector<ComplexVec>& noisy) override;

 private:
  std::vector<ComplexVec> clean_;
  std::size_t cursor_ = 0;
};

struct EvalOptions {
  double threshold_fraction = 0.05;
  std::size_t batch_size = 64;
};

/// Per-sample scores. mse and ssim compare normalized-scale spectra (the
/// dataset's [0, 1] map); cosine and detection use physical-scale spectra,
/// with the stored occupancy as detection ground truth.
struct SampleMetrics {
  double mse = 0.0;
  double cosine = 0.0;
  double ssim = 0.0;
  double pd = 0.0;
  double pfa = 0.0;
};

SampleMetrics score_sample(const ComplexVec& clean_physical, const ComplexVec& estimate_physical,
                           const std::vector<bool>& occupancy, const Normalization& norm,
                           double threshold_fraction);

/// Averages over the whole test split. Errors from an individual sample are
/// rethrown with the sample index. `per_sample`, when non-null, receives
/// every sample's scores.
MetricsReport evaluate(Reconstructor& method, const dataset::InMemoryDataset& test,
                       const EvalOptions& opts = {}, std::vector<SampleMetrics>* per_sample = nullptr);

}  // namespace thz::metrics

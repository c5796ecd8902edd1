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

#include "thz/metrics/evaluate.hpp"

#include <algorithm>
#include <string>

#include "thz/common/errors.hpp"

namespace thz::metrics {

std::vector<ComplexVec> CrnetReconstructor::reconstruct(const std::vector<ComplexVec>& noisy) {
  return crnet::reconstruct_batch(model_, noisy);
}

std::vector<ComplexVec> OmpReconstructor::reconstruct(const std::vector<ComplexVec>& noisy) {
  baseline::OmpConfig cfg = cfg_;
  cfg.max_sparsity = std::min(cfg.max_sparsity, matrix_.n_m);
  std::vector<ComplexVec> out;
  out.reserve(noisy.size());
  for (const auto& x : noisy) {
    out.push_back(baseline::omp_reconstruct(matrix_, sensing::compress(matrix_, x), cfg).estimate);
  }
  return out;
}

std::vector<ComplexVec> OracleReconstructor::reconstruct(const std::vector<ComplexVec>& noisy) {
  if (cursor_ + noisy.size() > clean_.size()) throw ConfigError("oracle: ran out of clean spectra");
  std::vector<ComplexVec> out(clean_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                              clean_.begin() + static_cast<std::ptrdiff_t>(cursor_ + noisy.size()));
  cursor_ += noisy.size();
  return out;
}

SampleMetrics score_sample(const ComplexVec& clean_physical, const ComplexVec& estimate_physical,
                           const std::vector<bool>& occupancy, const Normalization& norm,
                           double threshold_fraction) {
  auto normalized = [&](const ComplexVec& v) {
    ComplexVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      out[i] = {norm.normalize(v[i].real()), norm.normalize(v[i].imag())};
    }
    return out;
  };
  const ComplexVec cn = normalized(clean_physical);
  const ComplexVec en = normalized(estimate_physical);
  SampleMetrics s;
  s.mse = mse(cn, en);
  s.ssim = ssim(cn, en);
  s.cosine = cosine_similarity(clean_physical, estimate_physical);
  const auto rates = detection_rates(energy_detect(estimate_physical, threshold_fraction), occupancy);
  s.pd = rates.probability_detect;
  s.pfa = rates.probability_false_alarm;
  return s;
}

MetricsReport evaluate(Reconstructor& method, const dataset::InMemoryDataset& test,
                       const EvalOptions& opts, std::vector<SampleMetrics>* per_sample) {
  if (test.size() == 0) throw ConfigError("evaluate: empty test split");
  if (opts.batch_size == 0) throw ConfigError("evaluate: batch_size must be positive");
  const std::size_t n_s = test.n_s();
  const Normalization norm = test.header.normalization();

  MetricsReport rep;
  rep.snr_db = test.header.snr_db;
  rep.method = method.name();
  if (per_sample) per_sample->clear();

  for (std::size_t start = 0; start < test.size(); start += opts.batch_size) {
    const std::size_t stop = std::min(test.size(), start + opts.batch_size);
    std::vector<ComplexVec> noisy, clean;
    for (std::size_t i = start; i < stop; ++i) {
      noisy.push_back(dataset::to_physical(test.input(i), n_s, test.header));
      clean.push_back(dataset::to_physical(test.label(i), n_s, test.header));
    }
    std::vector<ComplexVec> est;
    try {
      est = method.reconstruct(noisy);
    } catch (const std::exception& e) {
      throw NumericalError("evaluate: " + method.name() + " failed on samples " +
                           std::to_string(start) + ".." + std::to_string(stop - 1) + ": " + e.what());
    }
    if (est.size() != noisy.size()) throw ShapeError("evaluate: reconstructor returned wrong count");
    for (std::size_t k = 0; k < est.size(); ++k) {
      const std::size_t i = start + k;
      SampleMetrics s;
      try {
        s = score_sample(clean[k], est[k], test.occupancy[i], norm, opts.threshold_fraction);
      } catch (const std::exception& e) {
        throw NumericalError("evaluate: sample " + std::to_string(i) + ": " + e.what());
      }
      rep.mse += s.mse;
      rep.cosine += s.cosine;
      rep.ssim += s.ssim;
      rep.pd += s.pd;
      rep.pfa += s.pfa;
      if (per_sample) per_sample->push_back(s);
    }
  }
  const double n = static_cast<double>(test.size());
  rep.mse /= n;
  rep.cosine /= n;
  rep.ssim /= n;
  rep.pd /= n;
  rep.pfa /= n;
  rep.n_samples = test.size();
  return rep;
}

}  // namespace thz::metrics

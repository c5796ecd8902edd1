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
#include <ostream>
#include <string>
#include <vector>

#include "thz/common/complex.hpp"

namespace thz::metrics {

/// ||a - b||^2 / N over complex entries.
double mse(const ComplexVec& a, const ComplexVec& b);

/// Cosine between a and b seen as real vectors of length 2N, i.e.
/// Re<a, b> / (||a|| ||b||). Throws DomainError if either vector is zero.
double cosine_similarity(const ComplexVec& a, const ComplexVec& b);

inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

/// Global SSIM of two real sequences (means, population variances, covariance).
double ssim_real(const std::vector<double>& a, const std::vector<double>& b);

/// Mean of the real-part SSIM and the imaginary-part SSIM. Inputs are expected
/// on the normalized [0, 1] scale (dynamic range 1).
double ssim(const ComplexVec& a, const ComplexVec& b);

/// Bin i is occupied iff |x_i|^2 >= threshold_fraction * max_j |x_j|^2.
/// An all-zero spectrum yields an all-idle mask.
std::vector<bool> energy_detect(const ComplexVec& spectrum, double threshold_fraction);

struct DetectionRates {
  double probability_detect = 0.0;       // hits / occupied bins (1 if none occupied)
  double probability_false_alarm = 0.0;  // false alarms / idle bins (0 if none idle)
};

DetectionRates detection_rates(const std::vector<bool>& detected, const std::vector<bool>& truth);

struct MetricsReport {
  double snr_db = 0.0;
  double compression_rate = 0.0;
  std::string method;
  double mse = 0.0;
  double cosine = 0.0;
  double ssim = 0.0;
  double pd = 0.0;
  double pfa = 0.0;
  std::size_t n_samples = 0;
};

/// "snr_db,compression_rate,method,mse,cosine,ssim,pd,pfa,n_samples"
std::string csv_header();
std::string to_csv_row(const MetricsReport& r);
MetricsReport parse_csv_row(const std::string& line);

}  // namespace thz::metrics

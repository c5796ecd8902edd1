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

#include "thz/metrics/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "thz/common/errors.hpp"

namespace thz::metrics {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
  if (a == 0) throw ShapeError(std::string(what) + ": empty input");
}

}  // namespace

double mse(const ComplexVec& a, const ComplexVec& b) {
  require_same_length(a.size(), b.size(), "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

double cosine_similarity(const ComplexVec& a, const ComplexVec& b) {
  require_same_length(a.size(), b.size(), "cosine_similarity");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    na += std::norm(a[i]);
    nb += std::norm(b[i]);
  }
  if (na == 0.0 || nb == 0.0) throw DomainError("cosine_similarity: zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double ssim_real(const std::vector<double>& a, const std::vector<double>& b) {
  require_same_length(a.size(), b.size(), "ssim");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double va = 0.0, vb = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
    cov += (a[i] - ma) * (b[i] - mb);
  }
  va /= n;
  vb /= n;
  cov /= n;
  return ((2 * ma * mb + kSsimC1) * (2 * cov + kSsimC2)) /
         ((ma * ma + mb * mb + kSsimC1) * (va + vb + kSsimC2));
}

double ssim(const ComplexVec& a, const ComplexVec& b) {
  require_same_length(a.size(), b.size(), "ssim");
  std::vector<double> ar(a.size()), ai(a.size()), br(b.size()), bi(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ar[i] = a[i].real();
    ai[i] = a[i].imag();
    br[i] = b[i].real();
    bi[i] = b[i].imag();
  }
  return 0.5 * (ssim_real(ar, br) + ssim_real(ai, bi));
}

std::vector<bool> energy_detect(const ComplexVec& spectrum, double threshold_fraction) {
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0)) {
    throw ConfigError("energy_detect: threshold fraction must be in (0, 1], got " +
                      std::to_string(threshold_fraction));
  }
  double peak = 0.0;
  for (const auto& v : spectrum) peak = std::max(peak, std::norm(v));
  std::vector<bool> out(spectrum.size(), false);
  if (peak == 0.0) return out;
  const double thr = threshold_fraction * peak;
  for (std::size_t i = 0; i < spectrum.size(); ++i) out[i] = std::norm(spectrum[i]) >= thr;
  return out;
}

DetectionRates detection_rates(const std::vector<bool>& detected, const std::vector<bool>& truth) {
  require_same_length(detected.size(), truth.size(), "detection_rates");
  std::size_t occ = 0, hits = 0, idle = 0, fa = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      ++occ;
      if (detected[i]) ++hits;
    } else {
      ++idle;
      if (detected[i]) ++fa;
    }
  }
  DetectionRates r;
  r.probability_detect = occ ? static_cast<double>(hits) / static_cast<double>(occ) : 1.0;
  r.probability_false_alarm = idle ? static_cast<double>(fa) / static_cast<double>(idle) : 0.0;
  return r;
}

std::string csv_header() { return "snr_db,compression_rate,method,mse,cosine,ssim,pd,pfa,n_samples"; }

std::string to_csv_row(const MetricsReport& r) {
  std::ostringstream os;
  os << std::setprecision(10) << r.snr_db << ',' << r.compression_rate << ',' << r.method << ','
     << r.mse << ',' << r.cosine << ',' << r.ssim << ',' << r.pd << ',' << r.pfa << ','
     << r.n_samples;
  return os.str();
}

MetricsReport parse_csv_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  if (f.size() != 9) throw FormatError("metrics row: expected 9 fields, got " + std::to_string(f.size()));
  MetricsReport r;
  try {
    r.snr_db = std::stod(f[0]);
    r.compression_rate = std::stod(f[1]);
    r.method = f[2];
    r.mse = std::stod(f[3]);
    r.cosine = std::stod(f[4]);
    r.ssim = std::stod(f[5]);
    r.pd = std::stod(f[6]);
    r.pfa = std::stod(f[7]);
    r.n_samples = static_cast<std::size_t>(std::stoull(f[8]));
  } catch (const std::logic_error&) {
    throw FormatError("metrics row: bad number in '" + line + "'");
  }
  return r;
}

}  // namespace thz::metrics

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

#include <complex>
#include <filesystem>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "thz/common/random.hpp"

namespace thz::channel {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Piecewise-linear molecular absorption coefficient K(f) in 1/m.
/// An empty table disables absorption.
class AbsorptionTable {
 public:
  AbsorptionTable() = default;
  /// (frequency Hz, coefficient 1/m) breakpoints; frequencies strictly
  /// increasing, coefficients non-negative.
  explicit AbsorptionTable(std::vector<std::pair<double, double>> points);

  /// Two-column CSV "frequency_hz,k_per_m" with a header row.
  static AbsorptionTable load_csv(const std::filesystem::path& path);

  bool empty() const { return points_.empty(); }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

  /// Linear interpolation; DomainError outside the tabulated range.
  double coefficient(double f_hz) const;

 private:
  std::vector<std::pair<double, double>> points_;
};

/// Illustrative water-vapour-like profile over 0.1-0.64 THz. Not spectroscopic
/// data; the peaks only sit near the strong lines of that window.
AbsorptionTable default_absorption_table();

struct ChannelConfig {
  int n_t = 1;
  int n_r = 1;
  double g_t_dbi = 30.0;
  double g_r_dbi = 30.0;
  int l1 = 3;  // first-order reflections
  int l2 = 2;  // second-order reflections
  double first_order_loss_db = 10.0;
  double second_order_loss_db = 20.0;
  AbsorptionTable absorption;

  int n_nlos() const { return l1 + l2; }
  void validate() const;
};

struct Angles {
  double theta = 0.0;  // azimuth
  double phi = 0.0;    // elevation
};

struct Ray {
  std::complex<double> gain;  // alpha, magnitude and phase
  Angles aod;
  Angles aoa;
  int order = 0;  // 0 = LOS, 1/2 = reflection order
};

struct ChannelRealization {
  double frequency_hz = 0.0;
  double distance_m = 0.0;
  std::vector<Ray> rays;
  Eigen::MatrixXcd h;  // n_r x n_t
};

/// Free-space spreading power gain (c / (4 pi f d))^2.
double spreading_loss(double f_hz, double d_m);

/// exp(-K(f) d); 1 when the table is empty.
double absorption_loss(double f_hz, double d_m, const AbsorptionTable& table);

/// Half-wavelength uniform linear array response,
/// element k = exp(j pi k sin(theta)) / sqrt(n). A ULA only resolves the
/// azimuth, so the elevation angle does not enter.
Eigen::VectorXcd steering_vector(int n_elements, double theta, double phi = 0.0);

/// Linear amplitude factor sqrt(10^(dbi/10)).
double antenna_amplitude(double dbi);

/// One LOS ray plus l1 first-order and l2 second-order reflections, each with
/// an independent uniform phase and uniform angles, combined into
///   h = sqrt(n_t n_r) G_t G_r sum_k alpha_k a_r(aoa_k) a_t(aod_k)^H.
ChannelRealization sample_channel(double f_hz, double d_m, const ChannelConfig& config, Rng& rng);

/// Rebuild h from a ray list; sample_channel uses the same routine.
Eigen::MatrixXcd assemble_channel(const std::vector<Ray>& rays, const ChannelConfig& config);

}  // namespace thz::channel

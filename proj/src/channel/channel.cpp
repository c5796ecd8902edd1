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

#include "thz/channel/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "thz/common/errors.hpp"

namespace thz::channel {

using std::numbers::pi;

AbsorptionTable::AbsorptionTable(std::vector<std::pair<double, double>> points)
    : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i].second >= 0.0) || !std::isfinite(points_[i].second)) {
      throw ConfigError("absorption table: coefficient at row " + std::to_string(i) +
                        " must be finite and >= 0");
    }
    if (i > 0 && !(points_[i].first > points_[i - 1].first)) {
      throw ConfigError("absorption table: frequencies must be strictly increasing (row " +
                        std::to_string(i) + ")");
    }
  }
}

AbsorptionTable AbsorptionTable::load_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open absorption table " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw FormatError(path.string() + ": empty file (header row required)");
  {
    std::string first = line;
    std::replace(first.begin(), first.end(), ',', ' ');
    std::istringstream fields(first);
    double f = 0.0, k = 0.0;
    if (fields >> f >> k) throw FormatError(path.string() + ":1: numeric first row, header row required");
  }
  std::vector<std::pair<double, double>> points;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double f = 0.0, k = 0.0;
    if (!(fields >> f >> k)) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": expected two numeric columns");
    }
    points.emplace_back(f, k);
  }
  return AbsorptionTable(std::move(points));
}

double AbsorptionTable::coefficient(double f_hz) const {
  if (points_.empty()) return 0.0;
  if (f_hz < points_.front().first || f_hz > points_.back().first) {
    throw DomainError("absorption table: frequency " + std::to_string(f_hz) +
                      " Hz outside tabulated range [" + std::to_string(points_.front().first) +
                      ", " + std::to_string(points_.back().first) + "]");
  }
  if (points_.size() == 1) return points_.front().second;
  auto hi = std::lower_bound(points_.begin(), points_.end(), f_hz,
                             [](const auto& p, double f) { return p.first < f; });
  if (hi == points_.begin()) return hi->second;
  auto lo = std::prev(hi);
  const double t = (f_hz - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

AbsorptionTable default_absorption_table() {
  return AbsorptionTable({
      {0.100e12, 0.0005}, {0.150e12, 0.0010}, {0.183e12, 0.0300}, {0.210e12, 0.0015},
      {0.300e12, 0.0040}, {0.325e12, 0.0250}, {0.350e12, 0.0060}, {0.380e12, 0.0450},
      {0.410e12, 0.0080}, {0.448e12, 0.0350}, {0.480e12, 0.0100}, {0.557e12, 0.1500},
      {0.600e12, 0.0150}, {0.640e12, 0.0200},
  });
}

void ChannelConfig::validate() const {
  if (n_t < 1 || n_r < 1) throw ConfigError("channel: antenna counts must be >= 1");
  if (l1 < 0 || l2 < 0) throw ConfigError("channel: reflected path counts must be >= 0");
  if (!std::isfinite(g_t_dbi) || !std::isfinite(g_r_dbi)) {
    throw ConfigError("channel: antenna gains must be finite");
  }
}

double spreading_loss(double f_hz, double d_m) {
  if (!(f_hz > 0.0) || !(d_m > 0.0)) {
    throw DomainError("spreading_loss: frequency and distance must be positive");
  }
  const double a = kSpeedOfLight / (4.0 * pi * f_hz * d_m);
  return a * a;
}

double absorption_loss(double f_hz, double d_m, const AbsorptionTable& table) {
  if (!(d_m > 0.0)) throw DomainError("absorption_loss: distance must be positive");
  if (table.empty()) return 1.0;
  return std::exp(-table.coefficient(f_hz) * d_m);
}

Eigen::VectorXcd steering_vector(int n_elements, double theta, double /*phi*/) {
  if (n_elements < 1) throw ConfigError("steering_vector: need at least one element");
  Eigen::VectorXcd a(n_elements);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n_elements));
  const double s = std::sin(theta);
  for (int k = 0; k < n_elements; ++k) a(k) = std::polar(norm, pi * k * s);
  return a;
}

double antenna_amplitude(double dbi) { return std::sqrt(std::pow(10.0, dbi / 10.0)); }

Eigen::MatrixXcd assemble_channel(const std::vector<Ray>& rays, const ChannelConfig& config) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(config.n_r, config.n_t);
  for (const Ray& ray : rays) {
    const Eigen::VectorXcd ar = steering_vector(config.n_r, ray.aoa.theta, ray.aoa.phi);
    const Eigen::VectorXcd at = steering_vector(config.n_t, ray.aod.theta, ray.aod.phi);
    h += ray.gain * (ar * at.adjoint());
  }
  const double scale = std::sqrt(static_cast<double>(config.n_t) * config.n_r) *
                       antenna_amplitude(config.g_t_dbi) * antenna_amplitude(config.g_r_dbi);
  return h * scale;
}

ChannelRealization sample_channel(double f_hz, double d_m, const ChannelConfig& config, Rng& rng) {
  config.validate();
  const double los_power = spreading_loss(f_hz, d_m) * absorption_loss(f_hz, d_m, config.absorption);

  std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
  std::uniform_real_distribution<double> azimuth(-pi, pi);
  std::uniform_real_distribution<double> elevation(-pi / 2.0, pi / 2.0);
  auto draw_angles = [&] {
    Angles a;
    a.theta = azimuth(rng);
    a.phi = elevation(rng);
    return a;
  };
  auto make_ray = [&](int order, double power) {
    Ray r;
    r.order = order;
    r.gain = std::polar(std::sqrt(power), phase(rng));
    r.aod = draw_angles();
    r.aoa = draw_angles();
    return r;
  };

  ChannelRealization out;
  out.frequency_hz = f_hz;
  out.distance_m = d_m;
  out.rays.reserve(1 + config.n_nlos());
  out.rays.push_back(make_ray(0, los_power));
  const double g1 = std::pow(10.0, -config.first_order_loss_db / 10.0);
  const double g2 = std::pow(10.0, -config.second_order_loss_db / 10.0);
  for (int i = 0; i < config.l1; ++i) out.rays.push_back(make_ray(1, g1 * los_power));
  for (int i = 0; i < config.l2; ++i) out.rays.push_back(make_ray(2, g2 * los_power));
  out.h = assemble_channel(out.rays, config);
  return out;
}

}  // namespace thz::channel

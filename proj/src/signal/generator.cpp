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

#include "thz/signal/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "thz/common/errors.hpp"

namespace thz::signal {

std::size_t OccupancyMask::occupied_count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

channel::ChannelConfig GenConfig::default_channel() {
  channel::ChannelConfig c;
  c.absorption = channel::default_absorption_table();
  return c;
}

void GenConfig::validate() const {
  if (!(f_a > 0.0) || !(f_a < f_b)) throw ConfigError("generator: need 0 < f_a < f_b");
  if (n_s < 2) throw ConfigError("generator: n_s must be >= 2");
  if (block_size == 0) throw ConfigError("generator: block_size must be >= 1");
  if (n_users * (block_size + 2 * guard) > n_s) {
    throw ConfigError("generator: infeasible occupancy, " + std::to_string(n_users) +
                      " users x (block " + std::to_string(block_size) + " + 2 x guard " +
                      std::to_string(guard) + ") exceeds " + std::to_string(n_s) + " subcarriers");
  }
  if (!(d_min > 0.0) || !(d_min <= d_max)) throw ConfigError("generator: need 0 < d_min <= d_max");
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw ConfigError("generator: snr_db must be a number or +inf");
  }
  channel.validate();
}

OccupancyMask sample_occupancy(const GenConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t footprint = cfg.block_size + 2 * cfg.guard;
  const std::size_t free = cfg.n_s - cfg.n_users * footprint;

  // Choose n_users distinct slots out of free + n_users; slot p_j minus j is
  // the number of free cells before footprint j.
  std::vector<std::size_t> slots(free + cfg.n_users);
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
  for (std::size_t j = 0; j < cfg.n_users; ++j) {
    std::uniform_int_distribution<std::size_t> pick(j, slots.size() - 1);
    std::swap(slots[j], slots[pick(rng)]);
  }
  std::sort(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(cfg.n_users));

  OccupancyMask mask;
  mask.bits.assign(cfg.n_s, false);
  for (std::size_t j = 0; j < cfg.n_users; ++j) {
    const std::size_t start = (slots[j] - j) + j * footprint + cfg.guard;
    mask.user_blocks.push_back(UserBlock{start, cfg.block_size});
    for (std::size_t k = 0; k < cfg.block_size; ++k) mask.bits[start + k] = true;
  }
  return mask;
}

double subcarrier_frequency(const GenConfig& cfg, std::size_t i) {
  if (i >= cfg.n_s) {
    throw ConfigError("subcarrier index " + std::to_string(i) + " out of range [0, " +
                      std::to_string(cfg.n_s) + ")");
  }
  if (i == cfg.n_s - 1) return cfg.f_b;
  return cfg.f_a + static_cast<double>(i) * (cfg.f_b - cfg.f_a) / static_cast<double>(cfg.n_s - 1);
}

WidebandSample generate_sample(const GenConfig& cfg, Rng& rng) {
  cfg.validate();
  WidebandSample s;
  s.snr_db = cfg.snr_db;
  s.occupancy = sample_occupancy(cfg, rng);
  if (s.occupancy.occupied_count() == 0) {
    throw ConfigError("generate_sample: no occupied subcarriers, SNR is undefined");
  }

  std::uniform_real_distribution<double> distance(cfg.d_min, cfg.d_max);
  std::uniform_int_distribution<int> qpsk(0, 3);
  const int n_t = cfg.channel.n_t;

  s.clean_spectrum.assign(cfg.n_s, Complex{0.0, 0.0});
  double power = 0.0;
  for (const UserBlock& block : s.occupancy.user_blocks) {
    const double d = distance(rng);
    s.user_distances_m.push_back(d);
    for (std::size_t i = block.start; i < block.start + block.width; ++i) {
      const channel::ChannelRealization ch =
          channel::sample_channel(subcarrier_frequency(cfg, i), d, cfg.channel, rng);
      const double angle = std::numbers::pi / 4.0 + std::numbers::pi / 2.0 * qpsk(rng);
      const Complex symbol = std::polar(1.0, angle);
      // Equal-power transmit vector; w is the unit-norm matched combiner.
      const Eigen::VectorXcd u = Eigen::VectorXcd::Constant(n_t, 1.0 / std::sqrt(double(n_t)));
      const Eigen::VectorXcd hu = ch.h * u;
      const double gain = hu.norm();
      Complex combined{0.0, 0.0};
      if (gain > 0.0) {
        const Eigen::VectorXcd w = hu / gain;
        combined = w.adjoint() * hu;
      }
      s.clean_spectrum[i] = combined * symbol;
      power += std::norm(s.clean_spectrum[i]);
    }
  }

  s.noisy_spectrum = s.clean_spectrum;
  if (cfg.noise_enabled()) {
    const double mean_power = power / static_cast<double>(s.occupancy.occupied_count());
    const double variance = mean_power / std::pow(10.0, cfg.snr_db / 10.0);
    std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
    for (Complex& v : s.noisy_spectrum) v += Complex(gauss(rng), gauss(rng));
  }
  return s;
}

}  // namespace thz::signal

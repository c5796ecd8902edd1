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
#include <cmath>
#include <limits>
#include <vector>

#include "thz/channel/channel.hpp"
#include "thz/common/complex.hpp"
#include "thz/common/random.hpp"

namespace thz::signal {

struct UserBlock {
  std::size_t start = 0;
  std::size_t width = 0;
};

struct OccupancyMask {
  std::vector<bool> bits;
  std::vector<UserBlock> user_blocks;

  std::size_t occupied_count() const;
};

struct GenConfig {
  double f_a = 0.1e12;
  double f_b = 0.64e12;
  std::size_t n_s = 256;
  std::size_t n_users = 8;
  std::size_t block_size = 5;
  std::size_t guard = 1;
  double d_min = 1.0;
  double d_max = 10.0;
  /// +infinity disables noise.
  double snr_db = 30.0;
  channel::ChannelConfig channel = default_channel();

  static channel::ChannelConfig default_channel();
  bool noise_enabled() const { return std::isfinite(snr_db); }
  void validate() const;
};

struct WidebandSample {
  ComplexVec clean_spectrum;  // label
  ComplexVec noisy_spectrum;  // model input
  OccupancyMask occupancy;
  double snr_db = 0.0;
  std::vector<double> user_distances_m;
};

/// Places n_users blocks uniformly at random. Each user owns a footprint of
/// block_size + 2 * guard subcarriers (its block plus a guard on either side)
/// and footprints never overlap, so gaps between blocks are >= 2 * guard and a
/// block never touches the band edge. Sampling is exact: the free subcarriers
/// are distributed over the n_users + 1 gaps uniformly over all compositions.
OccupancyMask sample_occupancy(const GenConfig& cfg, Rng& rng);

/// f_a + i (f_b - f_a) / (n_s - 1).
double subcarrier_frequency(const GenConfig& cfg, std::size_t i);

/// Build one (noisy, clean) spectrum pair bin by bin. Occupied bin i carries
/// w^H H_i x_i with x_i a unit-modulus QPSK symbol and w the matched unit-norm
/// combiner; the noise variance makes (mean occupied-bin power) / variance
/// equal 10^(snr_db / 10).
WidebandSample generate_sample(const GenConfig& cfg, Rng& rng);

}  // namespace thz::signal

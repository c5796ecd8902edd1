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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "thz/common/errors.hpp"
#include "thz/signal/dft.hpp"
#include "thz/signal/generator.hpp"

using namespace thz;
using namespace thz::signal;
using Catch::Approx;

namespace {

ComplexVec random_vec(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  ComplexVec v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

ComplexVec direct_dft(const ComplexVec& x, double sign) {
  const std::size_t n = x.size();
  ComplexVec out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc{0, 0};
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = sign * 2.0 * std::numbers::pi * double(k * t % n) / double(n);
      acc += x[t] * Complex{std::cos(ang), std::sin(ang)};
    }
    out[k] = acc / std::sqrt(double(n));
  }
  return out;
}

double max_abs_diff(const ComplexVec& a, const ComplexVec& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double energy(const ComplexVec& x) {
  double e = 0;
  for (auto v : x) e += std::norm(v);
  return e;
}

GenConfig small_config(std::size_t n_s, std::size_t users, std::size_t block, std::size_t guard) {
  GenConfig c;
  c.n_s = n_s;
  c.n_users = users;
  c.block_size = block;
  c.guard = guard;
  return c;
}

}  // namespace

TEST_CASE("dft against direct summation") {
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 12u, 16u, 31u, 64u}) {
    const auto x = random_vec(n, n);
    CHECK(max_abs_diff(dft(x), direct_dft(x, -1.0)) < 1e-12);
    CHECK(max_abs_diff(idft(x), direct_dft(x, +1.0)) < 1e-12);
  }
}

TEST_CASE("dft inversion, delta, Parseval") {
  for (std::size_t n : {8u, 100u, 256u}) {
    const auto x = random_vec(n, 100 + n);
    CHECK(max_abs_diff(idft(dft(x)), x) < 1e-9);
    CHECK(std::abs(energy(dft(x)) - energy(x)) < 1e-9 * energy(x));
  }
  ComplexVec delta(16, Complex{0, 0});
  delta[0] = 1.0;
  for (auto v : dft(delta)) CHECK(std::abs(v - Complex{0.25, 0}) < 1e-15);
}

TEST_CASE("occupancy: single feasible placement") {
  Rng rng(1);
  auto cfg = small_config(7, 1, 5, 1);
  for (int i = 0; i < 20; ++i) {
    auto m = sample_occupancy(cfg, rng);
    REQUIRE(m.user_blocks.size() == 1);
    CHECK(m.user_blocks[0].start == 1);
  }
  auto cfg8 = small_config(8, 1, 5, 1);
  std::set<std::size_t> starts;
  for (int i = 0; i < 200; ++i) starts.insert(sample_occupancy(cfg8, rng).user_blocks[0].start);
  CHECK(starts == std::set<std::size_t>{1, 2});
}

TEST_CASE("occupancy: default recipe") {
  Rng rng(2);
  GenConfig cfg;
  for (int i = 0; i < 500; ++i) {
    auto m = sample_occupancy(cfg, rng);
    CHECK(m.occupied_count() == 40);
    REQUIRE(m.user_blocks.size() == 8);
    for (std::size_t j = 0; j < 8; ++j) {
      CHECK(m.user_blocks[j].width == 5);
      CHECK(m.user_blocks[j].start >= 1);
      CHECK(m.user_blocks[j].start + 5 + 1 <= 256);
      if (j > 0) {
        // gap of at least one guard bin for each neighbour
        CHECK(m.user_blocks[j].start >= m.user_blocks[j - 1].start + 5 + 2);
      }
    }
  }
}

TEST_CASE("occupancy covers every feasible placement uniformly") {
  auto cfg = small_config(16, 2, 3, 1);
  // enumerate placements: each footprint [s - g, s + b + g) inside [0, n_s),
  // footprints disjoint
  std::set<std::pair<std::size_t, std::size_t>> feasible;
  for (std::size_t a = 1; a + 3 + 1 <= 16; ++a)
    for (std::size_t b = a + 1; b + 3 + 1 <= 16; ++b)
      if (b - 1 >= a + 3 + 1) feasible.insert({a, b});
  REQUIRE(feasible.size() == 28);

  Rng rng(3);
  std::map<std::pair<std::size_t, std::size_t>, int> hits;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    auto m = sample_occupancy(cfg, rng);
    std::pair<std::size_t, std::size_t> key{m.user_blocks[0].start, m.user_blocks[1].start};
    REQUIRE(feasible.count(key) == 1);
    ++hits[key];
  }
  CHECK(hits.size() == feasible.size());
  const double expect = double(draws) / feasible.size();
  for (const auto& [k, n] : hits) CHECK(std::abs(n - expect) < 0.25 * expect);
}

TEST_CASE("occupancy rejects infeasible configs") {
  Rng rng(4);
  CHECK_THROWS_AS(sample_occupancy(small_config(20, 3, 5, 1), rng), ConfigError);
  auto zero = small_config(20, 0, 5, 1);
  CHECK_THROWS_AS(generate_sample(zero, rng), ConfigError);
}

TEST_CASE("subcarrier frequencies") {
  GenConfig cfg;
  CHECK(subcarrier_frequency(cfg, 0) == cfg.f_a);
  CHECK(subcarrier_frequency(cfg, 255) == cfg.f_b);
  // 0.1 THz + 128 * 0.54 THz / 255, evaluated offline
  CHECK(subcarrier_frequency(cfg, 128) == Approx(371058823529.41174).epsilon(1e-14));
  CHECK_THROWS_AS(subcarrier_frequency(cfg, 256), ConfigError);
}

TEST_CASE("generated samples: support, noiseless, reproducibility") {
  GenConfig cfg;
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    auto s = generate_sample(cfg, rng);
    for (std::size_t k = 0; k < cfg.n_s; ++k) {
      if (s.occupancy.bits[k]) CHECK(std::abs(s.clean_spectrum[k]) > 0.0);
      else CHECK(s.clean_spectrum[k] == Complex{0, 0});
    }
    for (double d : s.user_distances_m) {
      CHECK(d >= cfg.d_min);
      CHECK(d <= cfg.d_max);
    }
  }
  cfg.snr_db = std::numeric_limits<double>::infinity();
  auto s = generate_sample(cfg, rng);
  CHECK(s.noisy_spectrum == s.clean_spectrum);

  GenConfig c2;
  Rng a(9), b(9);
  auto s1 = generate_sample(c2, a);
  auto s2 = generate_sample(c2, b);
  CHECK(s1.noisy_spectrum == s2.noisy_spectrum);
  CHECK(s1.clean_spectrum == s2.clean_spectrum);
  CHECK(s1.occupancy.bits == s2.occupancy.bits);
}

TEST_CASE("empirical SNR matches the configured SNR") {
  for (double snr : {5.0, 20.0, 30.0}) {
    GenConfig cfg;
    cfg.snr_db = snr;
    Rng rng(6);
    double ratio_acc = 0.0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
      auto s = generate_sample(cfg, rng);
      double sig = 0, noise = 0;
      for (std::size_t k = 0; k < cfg.n_s; ++k) {
        if (s.occupancy.bits[k]) sig += std::norm(s.clean_spectrum[k]);
        noise += std::norm(s.noisy_spectrum[k] - s.clean_spectrum[k]);
      }
      ratio_acc += (sig / s.occupancy.occupied_count()) / (noise / cfg.n_s);
    }
    CHECK(std::abs(10.0 * std::log10(ratio_acc / n) - snr) < 0.5);
  }
}

TEST_CASE("closer users are louder") {
  GenConfig near, far;
  near.d_max = 2.0;
  far.d_min = 8.0;
  Rng a(7), b(7);
  double pn = 0, pf = 0;
  for (int i = 0; i < 100; ++i) {
    pn += energy(generate_sample(near, a).clean_spectrum);
    pf += energy(generate_sample(far, b).clean_spectrum);
  }
  CHECK(pn > pf);
}

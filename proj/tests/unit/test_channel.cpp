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
#include <filesystem>
#include <fstream>
#include <numbers>

#include "thz/channel/channel.hpp"
#include "thz/common/errors.hpp"

using namespace thz;
using namespace thz::channel;
using Catch::Approx;

namespace {

ChannelConfig bare_config() {
  ChannelConfig c;
  c.g_t_dbi = 0.0;
  c.g_r_dbi = 0.0;
  c.l1 = 0;
  c.l2 = 0;
  return c;
}

}  // namespace

TEST_CASE("spreading loss follows the free-space law") {
  const double f = 0.3e12, d = 5.0;
  CHECK(spreading_loss(f, 2 * d) == Approx(spreading_loss(f, d) / 4).epsilon(1e-15));
  CHECK(spreading_loss(2 * f, d) == Approx(spreading_loss(f, d) / 4).epsilon(1e-15));
  // (c / (4 pi 3e11 5))^2 evaluated offline
  CHECK(spreading_loss(f, d) == Approx(2.529526069841534e-10).epsilon(1e-14));
  CHECK(spreading_loss(f, d) > spreading_loss(f * 1.01, d));
  CHECK(spreading_loss(f, d) > spreading_loss(f, d * 1.01));
  CHECK_THROWS_AS(spreading_loss(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(spreading_loss(1e12, -1.0), DomainError);
}

TEST_CASE("absorption loss") {
  CHECK(absorption_loss(0.3e12, 10.0, AbsorptionTable{}) == 1.0);
  AbsorptionTable zero({{0.1e12, 0.0}, {1e12, 0.0}});
  CHECK(absorption_loss(0.5e12, 7.0, zero) == 1.0);
  AbsorptionTable flat({{0.1e12, 0.1}, {1e12, 0.1}});
  CHECK(absorption_loss(0.4e12, 10.0, flat) == Approx(std::exp(-1.0)).epsilon(1e-14));

  AbsorptionTable pw({{0.1e12, 0.01}, {0.2e12, 0.05}, {0.4e12, 0.03}});
  const double f = 0.25e12;
  const double k = 0.05 + (0.03 - 0.05) * (0.25 - 0.2) / (0.4 - 0.2);  // by hand
  CHECK(std::abs(pw.coefficient(f) - k) < 1e-12);
  CHECK(std::abs(absorption_loss(f, 3.0, pw) - std::exp(-k * 3.0)) < 1e-12);
  CHECK(pw.coefficient(0.1e12) == 0.01);
  CHECK(pw.coefficient(0.4e12) == 0.03);
  CHECK(absorption_loss(f, 2.0, pw) > absorption_loss(f, 3.0, pw));
  CHECK_THROWS_AS(pw.coefficient(0.05e12), DomainError);
  CHECK_THROWS_AS(pw.coefficient(0.5e12), DomainError);

  CHECK_THROWS_AS(AbsorptionTable({{0.2e12, 0.1}, {0.1e12, 0.1}}), ConfigError);
  CHECK_THROWS_AS(AbsorptionTable({{0.1e12, -0.1}, {0.2e12, 0.1}}), ConfigError);
}

TEST_CASE("absorption table CSV") {
  const auto p = std::filesystem::temp_directory_path() / "thz_abs_test.csv";
  {
    std::ofstream os(p);
    os << "frequency_hz,k_per_m\n1e11,0.5\n2e11,1.5\n";
  }
  const auto t = AbsorptionTable::load_csv(p);
  REQUIRE(t.points().size() == 2);
  CHECK(t.coefficient(1.5e11) == Approx(1.0));
  {
    std::ofstream os(p);
    os << "1e11,0.5\n2e11,1.5\n";
  }
  CHECK_THROWS(AbsorptionTable::load_csv(p));
  std::filesystem::remove(p);

  const auto def = default_absorption_table();
  CHECK_NOTHROW(def.coefficient(0.1e12));
  CHECK_NOTHROW(def.coefficient(0.64e12));
}

TEST_CASE("steering vectors") {
  auto a1 = steering_vector(1, 0.7);
  REQUIRE(a1.size() == 1);
  CHECK(std::abs(a1(0) - std::complex<double>(1, 0)) < 1e-15);
  auto a0 = steering_vector(5, 0.0);
  for (int k = 0; k < 5; ++k) CHECK(std::abs(a0(k) - 1.0 / std::sqrt(5.0)) < 1e-15);
  auto a4 = steering_vector(4, std::numbers::pi / 6);
  for (int k = 0; k < 4; ++k) {
    const auto expect = std::polar(0.5, std::numbers::pi * k / 2);
    CHECK(std::abs(a4(k) - expect) < 1e-12);
  }
  CHECK(a4.norm() == Approx(1.0));
}

TEST_CASE("LOS-only channel reduces to the spreading loss") {
  auto cfg = bare_config();
  Rng rng(1);
  for (double d : {1.0, 3.3, 10.0}) {
    auto r = sample_channel(0.3e12, d, cfg, rng);
    REQUIRE(r.rays.size() == 1);
    CHECK(std::norm(r.h(0, 0)) == Approx(spreading_loss(0.3e12, d)).epsilon(1e-12));
  }
}

TEST_CASE("ray gains obey the per-order laws on every realization") {
  ChannelConfig cfg;
  cfg.absorption = default_absorption_table();
  cfg.l1 = 3;
  cfg.l2 = 2;
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const double f = 0.1e12 + 0.54e12 * trial / 199.0;
    const double d = 1.0 + 9.0 * (trial % 17) / 16.0;
    auto r = sample_channel(f, d, cfg, rng);
    const double base = spreading_loss(f, d) * absorption_loss(f, d, cfg.absorption);
    REQUIRE(r.rays.size() == 6);
    int n1 = 0, n2 = 0;
    for (const auto& ray : r.rays) {
      const double ratio = std::norm(ray.gain) / base;
      if (ray.order == 0) CHECK(ratio == Approx(1.0).epsilon(1e-12));
      if (ray.order == 1) {
        CHECK(ratio == Approx(0.1).epsilon(1e-12));
        ++n1;
      }
      if (ray.order == 2) {
        CHECK(ratio == Approx(0.01).epsilon(1e-12));
        ++n2;
      }
      CHECK(ray.aod.theta >= -std::numbers::pi);
      CHECK(ray.aod.theta < std::numbers::pi);
      CHECK(std::abs(ray.aoa.phi) <= std::numbers::pi / 2);
    }
    CHECK(r.rays.front().order == 0);
    CHECK(n1 == 3);
    CHECK(n2 == 2);
  }
}

TEST_CASE("h is the steering-vector sum of its rays") {
  ChannelConfig cfg;
  cfg.n_t = 3;
  cfg.n_r = 2;
  Rng rng(3);
  auto r = sample_channel(0.2e12, 4.0, cfg, rng);
  const double g = std::pow(10.0, cfg.g_t_dbi / 20.0) * std::pow(10.0, cfg.g_r_dbi / 20.0);
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(2, 3);
  for (const auto& ray : r.rays) {
    expect += ray.gain * steering_vector(2, ray.aoa.theta, ray.aoa.phi) *
              steering_vector(3, ray.aod.theta, ray.aod.phi).adjoint();
  }
  expect *= std::sqrt(6.0) * g;
  CHECK((r.h - expect).norm() < 1e-12 * expect.norm());
  CHECK((assemble_channel(r.rays, cfg) - r.h).norm() == 0.0);
}

TEST_CASE("antenna gain scaling") {
  SECTION("30 dBi per side multiplies |h| by 1000 for the same draws") {
    auto lo = bare_config();
    lo.l1 = 2;
    auto hi = lo;
    hi.g_t_dbi = hi.g_r_dbi = 30.0;
    Rng r1(4), r2(4);
    auto a = sample_channel(0.5e12, 2.0, lo, r1);
    auto b = sample_channel(0.5e12, 2.0, hi, r2);
    CHECK(std::abs(b.h(0, 0)) == Approx(1000.0 * std::abs(a.h(0, 0))).epsilon(1e-12));
    CHECK(antenna_amplitude(30.0) == Approx(std::sqrt(1000.0)));
  }
  SECTION("Monte Carlo power with random NLOS phases") {
    ChannelConfig cfg;  // 30/30 dBi, 3 first-order and 2 second-order rays
    cfg.n_t = 4;
    cfg.n_r = 2;
    const double f = 0.3e12, d = 3.0;
    const double L = spreading_loss(f, d);
    Rng rng(5);
    const int draws = 10000;
    double acc = 0.0, acc_nlos = 0.0;
    for (int i = 0; i < draws; ++i) {
      auto r = sample_channel(f, d, cfg, rng);
      acc += r.h.squaredNorm();
      std::complex<double> s{0, 0};
      for (const auto& ray : r.rays)
        if (ray.order > 0) s += ray.gain;
      acc_nlos += std::norm(s);
    }
    // E||h||_F^2 = n_t n_r G_t^2 G_r^2 L (1 + 3 * 0.1 + 2 * 0.01)
    const double expect = 8.0 * 1e6 * L * (1.0 + 0.3 + 0.02);
    CHECK(std::abs(acc / draws / expect - 1.0) < 0.05);
    CHECK(std::abs(acc_nlos / draws / (L * 0.32) - 1.0) < 0.05);
  }
}

TEST_CASE("channel sampling is reproducible") {
  ChannelConfig cfg;
  cfg.n_t = 2;
  Rng a(6), b(6);
  auto r1 = sample_channel(0.4e12, 5.0, cfg, a);
  auto r2 = sample_channel(0.4e12, 5.0, cfg, b);
  CHECK(r1.h == r2.h);
  CHECK(r1.rays.size() == r2.rays.size());
}

TEST_CASE("channel config validation") {
  ChannelConfig c;
  c.n_t = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ChannelConfig{};
  c.l2 = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

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
#include <iterator>
#include <random>

#include "thz/common/errors.hpp"
#include "thz/dataset/dataset.hpp"
#include "thz/metrics/metrics.hpp"

using namespace thz;
using namespace thz::dataset;
namespace fs = std::filesystem;
using Catch::Approx;

namespace {

signal::GenConfig small_gen() {
  signal::GenConfig g;
  g.n_s = 64;
  g.n_users = 3;
  return g;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("generate then load round trip") {
  const auto dir = fresh_dir("thz_ds_roundtrip");
  const auto g = small_gen();
  auto paths = generate_dataset(g, {40, 10, 12}, 5, dir);
  CHECK(fs::exists(paths.train));
  CHECK(fs::exists(paths.val));
  CHECK(fs::exists(paths.test));
  CHECK(fs::exists(dir / "train.tspc.json"));

  const auto h = read_header(paths.train);
  CHECK(h.n_s == 64);
  CHECK(h.count == 40);
  CHECK(h.snr_db == 30.0);
  CHECK(h.norm_min < h.norm_max);
  CHECK(h.gen_config_digest == gen_config_digest(g));
  CHECK(read_header(paths.test).count == 12);
  CHECK(read_header(paths.val).normalization() == h.normalization());

  // regenerate sample 0 and the last sample of the training split by hand
  const Normalization norm = training_normalization(g, 40, 5);
  CHECK(norm == h.normalization());
  DatasetReader reader(paths.train);
  CHECK(reader.header() == h);
  Record rec;
  std::vector<Record> all;
  while (reader.next(rec)) all.push_back(rec);
  REQUIRE(all.size() == 40);
  for (std::size_t idx : {std::size_t{0}, std::size_t{39}}) {
    Rng rng(derive_seed(5, 0, idx));
    auto s = signal::generate_sample(g, rng);
    for (std::size_t i = 0; i < 64; ++i) {
      CHECK(all[idx].input[i] == static_cast<float>(norm.normalize(s.noisy_spectrum[i].real())));
      CHECK(all[idx].input[64 + i] == static_cast<float>(norm.normalize(s.noisy_spectrum[i].imag())));
      CHECK(all[idx].label[i] == static_cast<float>(norm.normalize(s.clean_spectrum[i].real())));
      CHECK(all[idx].occupancy[i] == s.occupancy.bits[i]);
    }
  }

  // in-memory view agrees with the streaming reader
  auto mem = load_dataset(paths.train);
  CHECK(mem.size() == 40);
  for (std::size_t i = 0; i < 128; ++i) {
    CHECK(mem.input(39)[i] == all[39].input[i]);
    CHECK(mem.label(0)[i] == all[0].label[i]);
  }
}

TEST_CASE("training split is normalized to exactly [0, 1]") {
  const auto dir = fresh_dir("thz_ds_norm");
  auto paths = generate_dataset(small_gen(), {30, 5, 5}, 6, dir);
  auto mem = load_dataset(paths.train);
  float lo = 1e9f, hi = -1e9f;
  for (float v : mem.inputs) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (float v : mem.labels) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo == 0.0f);
  CHECK(hi == 1.0f);
  const auto h = mem.header;
  CHECK(denormalize(0.0, h) == h.norm_min);
  CHECK(denormalize(1.0, h) == h.norm_max);
}

TEST_CASE("denormalize inverts normalize") {
  DatasetHeader h;
  h.norm_min = -0.25;
  h.norm_max = 0.31;
  Rng rng(7);
  std::uniform_real_distribution<double> u(-0.25, 0.31);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    const float stored = static_cast<float>(h.normalization().normalize(v));
    const double back = denormalize(stored, h);
    CHECK(std::abs(back - v) <= 1e-5 * std::max(std::abs(v), h.norm_max - h.norm_min));
  }
}

TEST_CASE("metrics survive the storage round trip") {
  const auto dir = fresh_dir("thz_ds_metrics");
  const auto g = small_gen();
  auto paths = generate_dataset(g, {20, 5, 8}, 8, dir);
  auto mem = load_dataset(paths.test);
  for (std::size_t idx = 0; idx < mem.size(); ++idx) {
    Rng rng(derive_seed(8, 2, idx));
    auto s = signal::generate_sample(g, rng);
    auto noisy = to_physical(mem.input(idx), 64, mem.header);
    auto clean = to_physical(mem.label(idx), 64, mem.header);
    CHECK(std::abs(metrics::cosine_similarity(clean, noisy) -
                   metrics::cosine_similarity(s.clean_spectrum, s.noisy_spectrum)) < 1e-4);
    CHECK(std::abs(metrics::mse(clean, noisy) - metrics::mse(s.clean_spectrum, s.noisy_spectrum)) <
          1e-4 * metrics::mse(s.clean_spectrum, s.noisy_spectrum) + 1e-12);
  }
}

TEST_CASE("generation is bit-identical for the same inputs") {
  const auto a = fresh_dir("thz_ds_det_a"), b = fresh_dir("thz_ds_det_b");
  auto pa = generate_dataset(small_gen(), {15, 4, 4}, 9, a);
  auto pb = generate_dataset(small_gen(), {15, 4, 4}, 9, b);
  CHECK(slurp(pa.train) == slurp(pb.train));
  CHECK(slurp(pa.test) == slurp(pb.test));
  auto pc = generate_dataset(small_gen(), {15, 4, 4}, 10, fresh_dir("thz_ds_det_c"));
  CHECK(slurp(pa.train) != slurp(pc.train));
}

TEST_CASE("config digest tracks every field") {
  const auto base = small_gen();
  const auto d0 = gen_config_digest(base);
  CHECK(gen_config_digest(base) == d0);
  std::vector<signal::GenConfig> variants(12, base);
  variants[0].f_a = 0.11e12;
  variants[1].f_b = 0.65e12;
  variants[2].n_s = 65;
  variants[3].n_users = 2;
  variants[4].block_size = 4;
  variants[5].guard = 2;
  variants[6].d_min = 1.5;
  variants[7].d_max = 9.0;
  variants[8].snr_db = 25.0;
  variants[9].channel.l1 = 1;
  variants[10].channel.g_t_dbi = 20.0;
  variants[11].channel.absorption = channel::AbsorptionTable{};
  for (const auto& v : variants) CHECK(gen_config_digest(v) != d0);
}

TEST_CASE("gen config JSON round trip") {
  auto g = small_gen();
  g.snr_db = std::numeric_limits<double>::infinity();
  g.channel.n_t = 4;
  auto back = gen_config_from_json(gen_config_to_json(g));
  CHECK(gen_config_digest(back) == gen_config_digest(g));
  auto off = gen_config_from_json(nlohmann::json::parse(R"({"channel": {"absorption": "off"}})"));
  CHECK(off.channel.absorption.empty());
}

TEST_CASE("corrupt files are reported with offsets") {
  const auto dir = fresh_dir("thz_ds_corrupt");
  auto paths = generate_dataset(small_gen(), {10, 3, 3}, 11, dir);
  const std::string bytes = slurp(paths.train);

  SECTION("truncated") {
    const auto p = dir / "trunc.tspc";
    std::ofstream(p, std::ios::binary) << bytes.substr(0, bytes.size() - 100);
    try {
      auto mem = load_dataset(p);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("declares 10 records") != std::string::npos);
      CHECK(msg.find("holds 9 complete records") != std::string::npos);
      CHECK(msg.find("byte offset") != std::string::npos);
    }
  }
  SECTION("unsupported version") {
    std::string v = bytes;
    v[4] = static_cast<char>(kDatasetVersion + 1);
    const auto p = dir / "ver.tspc";
    std::ofstream(p, std::ios::binary) << v;
    try {
      read_header(p);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("version") != std::string::npos);
    }
  }
  SECTION("bad magic") {
    std::string v = bytes;
    v[0] = 'X';
    const auto p = dir / "magic.tspc";
    std::ofstream(p, std::ios::binary) << v;
    CHECK_THROWS_AS(read_header(p), FormatError);
  }
  SECTION("short header") {
    const auto p = dir / "short.tspc";
    std::ofstream(p, std::ios::binary) << bytes.substr(0, 20);
    try {
      read_header(p);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("offset") != std::string::npos);
    }
  }
  SECTION("missing file") { CHECK_THROWS_AS(read_header(dir / "nope.tspc"), IoError); }
}

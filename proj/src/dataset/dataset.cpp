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

#include "thz/dataset/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "thz/common/binary_io.hpp"
#include "thz/common/errors.hpp"
#include "thz/common/random.hpp"

namespace thz::dataset {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'T', 'S', 'P', 'C'};

class Fnv1a {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= b[i];
      h_ *= 0x100000001B3ull;
    }
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xCBF29CE484222325ull;
};

void write_header(std::ostream& os, const DatasetHeader& h) {
  os.write(kMagic, 4);
  binio::put_u32(os, h.version);
  binio::put_u32(os, h.n_s);
  binio::put_u64(os, h.count);
  binio::put_f64(os, h.snr_db);
  binio::put_f64(os, h.norm_min);
  binio::put_f64(os, h.norm_max);
  binio::put_u64(os, h.gen_config_digest);
}

DatasetHeader parse_header(binio::Reader& r) {
  char magic[4];
  r.read_bytes(magic, 4, "magic");
  if (std::string_view(magic, 4) != std::string_view(kMagic, 4)) r.fail("bad magic (expected TSPC)");
  DatasetHeader h;
  h.version = r.u32("version");
  if (h.version != kDatasetVersion) {
    r.fail("unsupported dataset version " + std::to_string(h.version) + " (expected " +
           std::to_string(kDatasetVersion) + ")");
  }
  h.n_s = r.u32("n_s");
  h.count = r.u64("record count");
  h.snr_db = r.f64("snr_db");
  h.norm_min = r.f64("norm_min");
  h.norm_max = r.f64("norm_max");
  h.gen_config_digest = r.u64("digest");
  if (h.n_s == 0) r.fail("n_s must be >= 1");
  if (!(h.norm_min < h.norm_max)) r.fail("normalization constants not ordered (min >= max)");
  return h;
}

std::size_t mask_bytes(std::size_t n_s) { return (n_s + 7) / 8; }

void write_record(std::ostream& os, const signal::WidebandSample& s, const Normalization& norm) {
  const std::size_t n = s.clean_spectrum.size();
  auto channels = [&](const ComplexVec& v) {
    for (std::size_t i = 0; i < n; ++i) binio::put_f32(os, static_cast<float>(norm.normalize(v[i].real())));
    for (std::size_t i = 0; i < n; ++i) binio::put_f32(os, static_cast<float>(norm.normalize(v[i].imag())));
  };
  channels(s.noisy_spectrum);
  channels(s.clean_spectrum);
  std::vector<char> bits(mask_bytes(n), 0);
  for (std::size_t i = 0; i < n; ++i)
    if (s.occupancy.bits[i]) bits[i / 8] = static_cast<char>(bits[i / 8] | (1 << (i % 8)));
  os.write(bits.data(), static_cast<std::streamsize>(bits.size()));
}

void write_sidecar(const fs::path& path, const DatasetHeader& h, const signal::GenConfig& cfg,
                   std::uint64_t seed, const std::string& split) {
  nlohmann::json j;
  j["magic"] = "TSPC";
  j["version"] = h.version;
  j["split"] = split;
  j["n_s"] = h.n_s;
  j["count"] = h.count;
  j["snr_db"] = std::isfinite(h.snr_db) ? nlohmann::json(h.snr_db) : nlohmann::json("inf");
  j["norm_min"] = h.norm_min;
  j["norm_max"] = h.norm_max;
  j["gen_config_digest"] = h.gen_config_digest;
  j["seed"] = seed;
  j["gen_config"] = gen_config_to_json(cfg);
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

void write_split(const fs::path& path, const signal::GenConfig& cfg, std::size_t count,
                 std::uint64_t seed, std::uint64_t stream, const Normalization& norm,
                 const std::string& split) {
  DatasetHeader h;
  h.n_s = static_cast<std::uint32_t>(cfg.n_s);
  h.count = count;
  h.snr_db = cfg.snr_db;
  h.norm_min = norm.min;
  h.norm_max = norm.max;
  h.gen_config_digest = gen_config_digest(cfg);

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_header(os, h);
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng = make_rng(seed, stream, k);
    write_record(os, signal::generate_sample(cfg, rng), norm);
  }
  os.flush();
  if (!os) throw IoError("write failed for " + path.string());
  write_sidecar(fs::path(path.string() + ".json"), h, cfg, seed, split);
}

}  // namespace

std::size_t DatasetHeader::record_bytes() const {
  return 2 * 2 * static_cast<std::size_t>(n_s) * sizeof(float) + mask_bytes(n_s);
}

std::uint64_t gen_config_digest(const signal::GenConfig& cfg) {
  Fnv1a h;
  h.f64(cfg.f_a);
  h.f64(cfg.f_b);
  h.u64(cfg.n_s);
  h.u64(cfg.n_users);
  h.u64(cfg.block_size);
  h.u64(cfg.guard);
  h.f64(cfg.d_min);
  h.f64(cfg.d_max);
  h.f64(cfg.snr_db);
  const auto& c = cfg.channel;
  h.u64(static_cast<std::uint64_t>(c.n_t));
  h.u64(static_cast<std::uint64_t>(c.n_r));
  h.f64(c.g_t_dbi);
  h.f64(c.g_r_dbi);
  h.u64(static_cast<std::uint64_t>(c.l1));
  h.u64(static_cast<std::uint64_t>(c.l2));
  h.f64(c.first_order_loss_db);
  h.f64(c.second_order_loss_db);
  h.u64(c.absorption.points().size());
  for (const auto& [f, k] : c.absorption.points()) {
    h.f64(f);
    h.f64(k);
  }
  return h.value();
}

nlohmann::json gen_config_to_json(const signal::GenConfig& cfg) {
  nlohmann::json j;
  j["f_a"] = cfg.f_a;
  j["f_b"] = cfg.f_b;
  j["n_s"] = cfg.n_s;
  j["n_users"] = cfg.n_users;
  j["block_size"] = cfg.block_size;
  j["guard"] = cfg.guard;
  j["d_min"] = cfg.d_min;
  j["d_max"] = cfg.d_max;
  j["snr_db"] = std::isfinite(cfg.snr_db) ? nlohmann::json(cfg.snr_db) : nlohmann::json("inf");
  const auto& c = cfg.channel;
  nlohmann::json ch;
  ch["n_t"] = c.n_t;
  ch["n_r"] = c.n_r;
  ch["g_t_dbi"] = c.g_t_dbi;
  ch["g_r_dbi"] = c.g_r_dbi;
  ch["l1"] = c.l1;
  ch["l2"] = c.l2;
  ch["first_order_loss_db"] = c.first_order_loss_db;
  ch["second_order_loss_db"] = c.second_order_loss_db;
  nlohmann::json table = nlohmann::json::array();
  for (const auto& [f, k] : c.absorption.points()) table.push_back({f, k});
  ch["absorption_table"] = table;
  j["channel"] = ch;
  return j;
}

signal::GenConfig gen_config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  signal::GenConfig cfg;
  auto num = [&](const nlohmann::json& o, const char* key, auto& dst) {
    if (o.contains(key)) dst = o.at(key).get<std::remove_reference_t<decltype(dst)>>();
  };
  try {
    num(j, "f_a", cfg.f_a);
    num(j, "f_b", cfg.f_b);
    num(j, "n_s", cfg.n_s);
    num(j, "n_users", cfg.n_users);
    num(j, "block_size", cfg.block_size);
    num(j, "guard", cfg.guard);
    num(j, "d_min", cfg.d_min);
    num(j, "d_max", cfg.d_max);
    if (j.contains("snr_db")) {
      const auto& v = j.at("snr_db");
      cfg.snr_db = v.is_string() ? std::numeric_limits<double>::infinity() : v.get<double>();
    }
    if (j.contains("channel")) {
      const auto& ch = j.at("channel");
      auto& c = cfg.channel;
      num(ch, "n_t", c.n_t);
      num(ch, "n_r", c.n_r);
      num(ch, "g_t_dbi", c.g_t_dbi);
      num(ch, "g_r_dbi", c.g_r_dbi);
      num(ch, "l1", c.l1);
      num(ch, "l2", c.l2);
      num(ch, "first_order_loss_db", c.first_order_loss_db);
      num(ch, "second_order_loss_db", c.second_order_loss_db);
      if (ch.contains("absorption_table")) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& row : ch.at("absorption_table")) pts.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
        c.absorption = channel::AbsorptionTable(std::move(pts));
      }
      if (ch.contains("absorption_csv")) {
        fs::path p = ch.at("absorption_csv").get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        c.absorption = channel::AbsorptionTable::load_csv(p);
      }
      if (ch.contains("absorption") && ch.at("absorption").is_string() &&
          ch.at("absorption").get<std::string>() == "off") {
        c.absorption = channel::AbsorptionTable();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("generation config: ") + e.what());
  }
  return cfg;
}

Normalization training_normalization(const signal::GenConfig& cfg, std::size_t train_count,
                                     std::uint64_t seed) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < train_count; ++k) {
    Rng rng = make_rng(seed, 0, k);
    const signal::WidebandSample s = signal::generate_sample(cfg, rng);
    for (const ComplexVec* v : {&s.noisy_spectrum, &s.clean_spectrum})
      for (const Complex& c : *v) {
        lo = std::min({lo, c.real(), c.imag()});
        hi = std::max({hi, c.real(), c.imag()});
      }
  }
  if (!(lo < hi)) throw ConfigError("dataset: training split has zero dynamic range");
  return Normalization{lo, hi};
}

DatasetPaths generate_dataset(const signal::GenConfig& cfg, const SplitCounts& counts,
                              std::uint64_t seed, const fs::path& dir) {
  cfg.validate();
  if (counts.train == 0 || counts.val == 0 || counts.test == 0) {
    throw ConfigError("dataset: every split needs at least one sample");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  const Normalization norm = training_normalization(cfg, counts.train, seed);
  DatasetPaths paths{dir / "train.tspc", dir / "val.tspc", dir / "test.tspc"};
  write_split(paths.train, cfg, counts.train, seed, 0, norm, "train");
  write_split(paths.val, cfg, counts.val, seed, 1, norm, "val");
  write_split(paths.test, cfg, counts.test, seed, 2, norm, "test");
  return paths;
}

DatasetReader::DatasetReader(const fs::path& path) : path_(path), is_(path, std::ios::binary) {
  if (!is_) throw IoError("cannot open dataset " + path.string());
  binio::Reader r(is_, path.string());
  header_ = parse_header(r);
  const std::uintmax_t size = fs::file_size(path);
  const std::uintmax_t payload = size - kHeaderBytes;
  const std::uintmax_t available = payload / header_.record_bytes();
  if (available < header_.count || payload % header_.record_bytes() != 0) {
    throw FormatError(path.string() + ": truncated or padded file, header declares " +
                      std::to_string(header_.count) + " records but the file holds " +
                      std::to_string(available) + " complete records (" + std::to_string(size) +
                      " bytes, partial record at byte offset " +
                      std::to_string(kHeaderBytes + available * header_.record_bytes()) + ")");
  }
}

bool DatasetReader::next(Record& out) {
  if (index_ >= header_.count) return false;
  const std::size_t n = header_.n_s;
  binio::Reader r(is_, path_.string());
  out.input.resize(2 * n);
  out.label.resize(2 * n);
  for (float& v : out.input) v = r.f32("record input");
  for (float& v : out.label) v = r.f32("record label");
  std::vector<char> bits(mask_bytes(n));
  r.read_bytes(bits.data(), bits.size(), "occupancy");
  out.occupancy.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) out.occupancy[i] = (bits[i / 8] >> (i % 8)) & 1;
  ++index_;
  return true;
}

DatasetHeader read_header(const fs::path& path) { return DatasetReader(path).header(); }

InMemoryDataset load_dataset(const fs::path& path) {
  DatasetReader reader(path);
  InMemoryDataset ds;
  ds.header = reader.header();
  const std::size_t n = ds.header.n_s;
  ds.inputs.reserve(ds.header.count * 2 * n);
  ds.labels.reserve(ds.header.count * 2 * n);
  ds.occupancy.reserve(ds.header.count);
  Record rec;
  while (reader.next(rec)) {
    ds.inputs.insert(ds.inputs.end(), rec.input.begin(), rec.input.end());
    ds.labels.insert(ds.labels.end(), rec.label.begin(), rec.label.end());
    ds.occupancy.push_back(rec.occupancy);
  }
  return ds;
}

double denormalize(double x, const DatasetHeader& header) {
  return header.normalization().denormalize(x);
}

ComplexVec to_physical(const float* channels, std::size_t n_s, const DatasetHeader& header) {
  const Normalization norm = header.normalization();
  ComplexVec out(n_s);
  for (std::size_t i = 0; i < n_s; ++i) {
    out[i] = Complex(norm.denormalize(channels[i]), norm.denormalize(channels[n_s + i]));
  }
  return out;
}

}  // namespace thz::dataset

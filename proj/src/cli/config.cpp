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

#include "thz/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "thz/common/errors.hpp"
#include "thz/common/random.hpp"

namespace thz::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double snr_value(const json& v) {
  if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  if (!v.is_number()) throw ConfigError("snr_db entries must be numbers or \"inf\"");
  return v.get<double>();
}

template <typename T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace

std::vector<double> ExperimentConfig::snrs() const {
  std::vector<double> out;
  for (const auto& c : cells) {
    if (std::find(out.begin(), out.end(), c.snr_db) == out.end()) out.push_back(c.snr_db);
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (cells.empty()) throw ConfigError("experiment grid is empty");
  for (const auto& c : cells) {
    if (!(c.rate > 0.0 && c.rate < 1.0)) {
      throw ConfigError("compression rate must be in (0, 1), got " + std::to_string(c.rate));
    }
  }
  if (methods.empty()) throw ConfigError("no methods selected");
  for (const auto& m : methods) {
    if (m != "crnet" && m != "omp") throw ConfigError("unknown method '" + m + "' (expected crnet or omp)");
  }
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    throw ConfigError("threshold_fraction must be in (0, 1)");
  }
  if (counts.train == 0 || counts.val == 0 || counts.test == 0) {
    throw ConfigError("split counts must be at least 1");
  }
  generation.validate();
}

ExperimentConfig config_from_json(const json& j, const fs::path& base_dir) {
  ExperimentConfig cfg;
  try {
    take(j, "seed", cfg.seed);
    if (j.contains("out")) {
      fs::path p = j.at("out").get<std::string>();
      cfg.out = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (j.contains("generation")) cfg.generation = dataset::gen_config_from_json(j.at("generation"), base_dir);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      cfg.cells.clear();
      if (g.contains("cells")) {
        for (const auto& c : g.at("cells")) cfg.cells.push_back({snr_value(c.at("snr_db")), c.at("rate").get<double>()});
      } else {
        std::vector<double> snrs{cfg.generation.snr_db};
        std::vector<double> rates{0.5};
        if (g.contains("snr_db")) {
          snrs.clear();
          for (const auto& v : g.at("snr_db")) snrs.push_back(snr_value(v));
        }
        take(g, "rates", rates);
        for (double s : snrs) {
          for (double r : rates) cfg.cells.push_back({s, r});
        }
      }
    }
    take(j, "methods", cfg.methods);
    if (j.contains("counts")) {
      const auto& c = j.at("counts");
      take(c, "train", cfg.counts.train);
      take(c, "val", cfg.counts.val);
      take(c, "test", cfg.counts.test);
    }
    if (j.contains("crnet")) {
      const auto& c = j.at("crnet");
      take(c, "residual_blocks", cfg.crnet.residual_blocks);
      if (c.contains("block_filters")) {
        auto f = c.at("block_filters").get<std::vector<std::size_t>>();
        if (f.size() != 3) throw ConfigError("crnet.block_filters needs exactly 3 entries");
        std::copy(f.begin(), f.end(), cfg.crnet.block_filters.begin());
      }
      take(c, "kernel_size", cfg.crnet.kernel_size);
      take(c, "lr", cfg.crnet.lr);
      take(c, "epochs", cfg.crnet.epochs);
      take(c, "batch_size", cfg.crnet.batch_size);
    }
    if (j.contains("omp")) {
      const auto& o = j.at("omp");
      take(o, "max_sparsity", cfg.omp.max_sparsity);
      take(o, "residual_tol", cfg.omp.residual_tol);
      take(o, "max_iters", cfg.omp.max_iters);
      take(o, "ridge", cfg.omp.ridge);
    }
    take(j, "threshold_fraction", cfg.threshold_fraction);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad experiment config: ") + e.what());
  }
  cfg.crnet.seed = cfg.seed;
  cfg.crnet.n_s = cfg.generation.n_s;
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

std::string snr_tag(double snr_db) {
  if (std::isinf(snr_db)) return snr_db > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << snr_db;
  return os.str();
}

std::string cell_tag(const GridCell& cell) {
  std::ostringstream os;
  os << "snr_" << snr_tag(cell.snr_db) << "_rate_" << cell.rate;
  return os.str();
}

fs::path data_dir(const ExperimentConfig& cfg, double snr_db) {
  return cfg.out / "data" / ("snr_" + snr_tag(snr_db));
}

fs::path model_path(const ExperimentConfig& cfg, const GridCell& cell) {
  return cfg.out / "models" / ("crnet_" + cell_tag(cell) + ".crn");
}

fs::path history_path(const ExperimentConfig& cfg, const GridCell& cell) {
  return cfg.out / "models" / ("crnet_" + cell_tag(cell) + ".history.csv");
}

fs::path metrics_path(const ExperimentConfig& cfg) { return cfg.out / "metrics.csv"; }

std::uint64_t dataset_seed(const ExperimentConfig& cfg, double snr_db) {
  return derive_seed(cfg.seed, 1, fnv1a(snr_tag(snr_db)));
}

std::uint64_t model_seed(const ExperimentConfig& cfg, const GridCell& cell) {
  return derive_seed(cfg.seed, 2, fnv1a(cell_tag(cell)));
}

std::uint64_t shuffle_seed(const ExperimentConfig& cfg, const GridCell& cell) {
  return derive_seed(cfg.seed, 3, fnv1a(cell_tag(cell)));
}

std::uint64_t omp_matrix_seed(const ExperimentConfig& cfg, const GridCell& cell) {
  return derive_seed(cfg.seed, 4, fnv1a(cell_tag(cell)));
}

}  // namespace thz::cli

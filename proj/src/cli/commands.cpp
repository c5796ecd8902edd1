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

#include "thz/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "thz/cli/config.hpp"
#include "thz/common/errors.hpp"
#include "thz/crnet/checkpoint.hpp"
#include "thz/crnet/train.hpp"
#include "thz/metrics/evaluate.hpp"
#include "thz/sensing/sensing.hpp"

namespace thz::cli {

namespace fs = std::filesystem;

namespace {

struct SharedFlags {
  std::string config;
  std::uint64_t seed = 1;
  std::string out;
  bool seed_given = false;
  bool out_given = false;
};

void add_shared(CLI::App& app, SharedFlags& f) {
  app.add_option("--config", f.config, "Experiment config (JSON); explicit flags override it")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", f.seed, "Master seed (default 1)");
  app.add_option("--out", f.out, "Output root directory (default runs/default)");
}

ExperimentConfig base_config(const SharedFlags& f) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  if (f.seed_given) {
    cfg.seed = f.seed;
    cfg.crnet.seed = f.seed;
  }
  if (f.out_given) cfg.out = f.out;
  return cfg;
}

std::vector<GridCell> select_cells(const ExperimentConfig& cfg, const std::vector<double>& snrs,
                                   const std::vector<double>& rates) {
  std::vector<GridCell> out;
  if (!snrs.empty() && !rates.empty()) {
    // explicit cells override the grid
    for (double s : snrs) {
      for (double r : rates) out.push_back({s, r});
    }
    return out;
  }
  for (const auto& c : cfg.cells) {
    if (!snrs.empty() && std::find(snrs.begin(), snrs.end(), c.snr_db) == snrs.end()) continue;
    if (!rates.empty() && std::find(rates.begin(), rates.end(), c.rate) == rates.end()) continue;
    out.push_back(c);
  }
  if (out.empty()) throw ConfigError("no grid cell matches the --snr-db/--rate selection");
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

fs::path split_file(const ExperimentConfig& cfg, double snr, const char* split) {
  fs::path p = data_dir(cfg, snr) / (std::string(split) + ".tspc");
  if (!fs::exists(p)) {
    throw ConfigError("dataset " + p.string() + " not found; run `generate` first");
  }
  return p;
}

void print_header(std::ostream& out, const fs::path& path, const dataset::DatasetHeader& h) {
  out << "  " << path.string() << ": n_s=" << h.n_s << " count=" << h.count
      << " snr_db=" << snr_tag(h.snr_db) << " norm=[" << h.norm_min << ", " << h.norm_max
      << "] digest=" << std::hex << h.gen_config_digest << std::dec << "\n";
}

// ---- generate ------------------------------------------------------------

struct GenerateFlags {
  std::size_t ns = 0, users = 0, block = 0, guard = 0;
  std::vector<double> snr_db;
  std::size_t train = 0, val = 0, test = 0;
  double f_a = 0, f_b = 0, d_min = 0, d_max = 0;
  bool no_noise = false;
};

int cmd_generate(const SharedFlags& sf, const GenerateFlags& gf, const CLI::App& sub, std::ostream& out) {
  ExperimentConfig cfg = base_config(sf);
  auto given = [&](const char* name) { return sub.get_option(name)->count() > 0; };
  if (given("--ns")) cfg.generation.n_s = gf.ns;
  if (given("--users")) cfg.generation.n_users = gf.users;
  if (given("--block")) cfg.generation.block_size = gf.block;
  if (given("--guard")) cfg.generation.guard = gf.guard;
  if (given("--f-a")) cfg.generation.f_a = gf.f_a;
  if (given("--f-b")) cfg.generation.f_b = gf.f_b;
  if (given("--d-min")) cfg.generation.d_min = gf.d_min;
  if (given("--d-max")) cfg.generation.d_max = gf.d_max;
  if (given("--train")) cfg.counts.train = gf.train;
  if (given("--val")) cfg.counts.val = gf.val;
  if (given("--test")) cfg.counts.test = gf.test;
  std::vector<double> snrs = given("--snr-db") ? gf.snr_db : cfg.snrs();
  if (gf.no_noise) snrs = {std::numeric_limits<double>::infinity()};
  cfg.validate();

  for (double snr : snrs) {
    signal::GenConfig g = cfg.generation;
    g.snr_db = snr;
    g.validate();
    const fs::path dir = data_dir(cfg, snr);
    ensure_dir(dir);
    out << "generating snr_db=" << snr_tag(snr) << " into " << dir.string() << "\n";
    const auto paths = dataset::generate_dataset(g, cfg.counts, dataset_seed(cfg, snr), dir);
    for (const auto& p : {paths.train, paths.val, paths.test}) print_header(out, p, dataset::read_header(p));
  }
  return kExitOk;
}

// ---- train ---------------------------------------------------------------

struct TrainFlags {
  std::vector<double> snr_db, rate;
  std::size_t epochs = 0, batch = 0;
  double lr = 0;
  bool resume = false;
};

int cmd_train(const SharedFlags& sf, const TrainFlags& tf, const CLI::App& sub, std::ostream& out) {
  ExperimentConfig cfg = base_config(sf);
  auto given = [&](const char* name) { return sub.get_option(name)->count() > 0; };
  if (given("--epochs")) cfg.crnet.epochs = tf.epochs;
  if (given("--batch")) cfg.crnet.batch_size = tf.batch;
  if (given("--lr")) cfg.crnet.lr = tf.lr;
  if (cfg.crnet.epochs == 0) throw ConfigError("--epochs must be at least 1");

  for (const auto& cell : select_cells(cfg, tf.snr_db, tf.rate)) {
    const auto train = dataset::load_dataset(split_file(cfg, cell.snr_db, "train"));
    const auto val = dataset::load_dataset(split_file(cfg, cell.snr_db, "val"));

    crnet::CrnetConfig mc = cfg.crnet;
    mc.n_s = train.n_s();
    mc.n_m = crnet::CrnetConfig::measurements_for_rate(mc.n_s, cell.rate);
    mc.seed = model_seed(cfg, cell);
    mc.validate();

    const fs::path ckpt_path = model_path(cfg, cell);
    ensure_dir(ckpt_path.parent_path());
    const std::uint64_t shuf = shuffle_seed(cfg, cell);

    std::optional<crnet::Checkpoint> resumed;
    std::unique_ptr<crnet::CrnetModel<float>> fresh;
    crnet::CrnetModel<float>* model = nullptr;
    if (tf.resume && fs::exists(ckpt_path)) {
      resumed = crnet::load_checkpoint(ckpt_path);
      const auto& rc = resumed->model.config();
      if (rc.n_s != mc.n_s || rc.n_m != mc.n_m) {
        throw ConfigError("checkpoint " + ckpt_path.string() + " does not match cell " + cell_tag(cell));
      }
      model = &resumed->model;
    } else {
      fresh = std::make_unique<crnet::CrnetModel<float>>(mc, mc.seed);
      fresh->normalization = train.header.normalization();
      crnet::init_from_labels(*fresh, train);
      model = fresh.get();
    }

    crnet::Trainer trainer(*model, ad::AdamConfig{mc.lr});
    if (resumed) {
      crnet::restore_trainer(*resumed, trainer);
      trainer.optimizer().set_lr(mc.lr);
    }

    out << "training " << cell_tag(cell) << ": n_s=" << mc.n_s << " n_m=" << mc.n_m
        << " params=" << model->count_params() << " epochs " << trainer.epochs_completed() + 1 << ".."
        << mc.epochs << "\n";

    crnet::TrainOptions opts;
    opts.epochs = mc.epochs;
    opts.batch_size = std::min(mc.batch_size, train.size());
    opts.shuffle_seed = resumed ? resumed->shuffle_seed : shuf;
    const auto t0 = std::chrono::steady_clock::now();
    opts.on_epoch_end = [&](const crnet::EpochRecord& rec, crnet::CrnetModel<float>& m) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out << "  epoch " << rec.epoch << " train_loss " << std::setprecision(6) << rec.train_loss
          << " val_loss " << rec.val_loss << " (" << std::fixed << std::setprecision(1) << secs
          << " s)" << std::defaultfloat << std::endl;
      crnet::save_checkpoint(ckpt_path, m, &trainer, opts.shuffle_seed);
      crnet::write_history_csv(history_path(cfg, cell), trainer.history());
    };
    trainer.fit(train, val, opts);
    if (trainer.history().empty() || trainer.epochs_completed() >= mc.epochs) {
      crnet::save_checkpoint(ckpt_path, *model, &trainer, opts.shuffle_seed);
      crnet::write_history_csv(history_path(cfg, cell), trainer.history());
    }
    out << "  wrote " << ckpt_path.string() << "\n";
  }
  return kExitOk;
}

// ---- eval ----------------------------------------------------------------

struct EvalFlags {
  std::vector<double> snr_db, rate;
  std::vector<std::string> methods;
  double threshold = 0;
  std::size_t max_sparsity = 0;
};

std::unique_ptr<metrics::OmpReconstructor> make_omp(const ExperimentConfig& cfg, const GridCell& cell,
                                                    std::size_t n_s) {
  const std::size_t n_m = crnet::CrnetConfig::measurements_for_rate(n_s, cell.rate);
  Rng rng(omp_matrix_seed(cfg, cell));
  return std::make_unique<metrics::OmpReconstructor>(sensing::random_partial_idft(n_s, n_m, rng), cfg.omp);
}

crnet::CrnetModel<float> load_model_for(const ExperimentConfig& cfg, const GridCell& cell,
                                        const dataset::InMemoryDataset& test) {
  const fs::path p = model_path(cfg, cell);
  if (!fs::exists(p)) throw ConfigError("model " + p.string() + " not found; run `train` first");
  auto ckpt = crnet::load_checkpoint(p);
  if (ckpt.model.config().n_s != test.n_s()) {
    throw ConfigError("model " + p.string() + " expects n_s=" + std::to_string(ckpt.model.config().n_s) +
                      " but the test set has n_s=" + std::to_string(test.n_s()));
  }
  if (!ckpt.model.normalization) throw FormatError("model " + p.string() + " has no normalization constants");
  return std::move(ckpt.model);
}

int cmd_eval(const SharedFlags& sf, const EvalFlags& ef, const CLI::App& sub, std::ostream& out) {
  ExperimentConfig cfg = base_config(sf);
  auto given = [&](const char* name) { return sub.get_option(name)->count() > 0; };
  if (given("--methods")) cfg.methods = ef.methods;
  if (given("--threshold")) cfg.threshold_fraction = ef.threshold;
  if (given("--max-sparsity")) cfg.omp.max_sparsity = ef.max_sparsity;
  cfg.validate();

  metrics::EvalOptions eo;
  eo.threshold_fraction = cfg.threshold_fraction;

  std::vector<metrics::MetricsReport> rows;
  for (const auto& cell : select_cells(cfg, ef.snr_db, ef.rate)) {
    const auto test = dataset::load_dataset(split_file(cfg, cell.snr_db, "test"));
    for (const auto& method : cfg.methods) {
      metrics::MetricsReport rep;
      if (method == "crnet") {
        auto model = load_model_for(cfg, cell, test);
        metrics::CrnetReconstructor rec(model);
        rep = metrics::evaluate(rec, test, eo);
        rep.compression_rate = model.config().compression_rate();
      } else {
        auto rec = make_omp(cfg, cell, test.n_s());
        rep = metrics::evaluate(*rec, test, eo);
        rep.compression_rate =
            static_cast<double>(crnet::CrnetConfig::measurements_for_rate(test.n_s(), cell.rate)) /
            static_cast<double>(test.n_s());
      }
      rep.snr_db = cell.snr_db;
      out << metrics::to_csv_row(rep) << "\n";
      rows.push_back(rep);
    }
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.method, a.snr_db, a.compression_rate) < std::tie(b.method, b.snr_db, b.compression_rate);
  });

  ensure_dir(cfg.out);
  const fs::path mp = metrics_path(cfg);
  std::ofstream os(mp);
  if (!os) throw IoError("cannot write " + mp.string());
  os << metrics::csv_header() << "\n";
  for (const auto& r : rows) os << metrics::to_csv_row(r) << "\n";
  if (!os) throw IoError("write failed for " + mp.string());
  out << "wrote " << mp.string() << "\n";
  return kExitOk;
}

// ---- report --------------------------------------------------------------

struct ReportFlags {
  std::string metrics;
  std::size_t samples = 3;
};

std::vector<metrics::MetricsReport> read_metrics(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw IoError("cannot open metrics file " + p.string());
  std::string line;
  std::vector<metrics::MetricsReport> rows;
  if (!std::getline(is, line)) throw ConfigError("metrics file " + p.string() + " is empty");
  if (line != metrics::csv_header()) throw FormatError("metrics file " + p.string() + ": unexpected header");
  while (std::getline(is, line)) {
    if (!line.empty()) rows.push_back(metrics::parse_csv_row(line));
  }
  if (rows.empty()) throw ConfigError("metrics file " + p.string() + " has no rows");
  return rows;
}

void write_trace(const fs::path& p, const ComplexVec& clean, const ComplexVec& est) {
  std::ofstream os(p);
  if (!os) throw IoError("cannot write " + p.string());
  os << "bin,abs_original,abs_reconstructed\n" << std::setprecision(9);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    os << i << ',' << std::abs(clean[i]) << ',' << std::abs(est[i]) << "\n";
  }
  if (!os) throw IoError("write failed for " + p.string());
}

int cmd_report(const SharedFlags& sf, const ReportFlags& rf, std::ostream& out) {
  ExperimentConfig cfg = base_config(sf);
  const fs::path mp = rf.metrics.empty() ? metrics_path(cfg) : fs::path(rf.metrics);
  const auto rows = read_metrics(mp);

  out << std::left << std::setw(8) << "method" << std::right << std::setw(8) << "snr_db" << std::setw(8)
      << "rate" << std::setw(13) << "mse" << std::setw(12) << "cosine" << std::setw(10) << "ssim"
      << std::setw(8) << "pd" << std::setw(8) << "pfa" << std::setw(8) << "n" << "\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(8) << r.method << std::right << std::setw(8) << snr_tag(r.snr_db)
        << std::setw(8) << std::setprecision(4) << r.compression_rate << std::setw(13) << std::setprecision(4)
        << r.mse << std::setw(12) << r.cosine << std::setw(10) << r.ssim << std::setw(8)
        << std::setprecision(3) << r.pd << std::setw(8) << r.pfa << std::setw(8) << r.n_samples << "\n";
  }

  if (rf.samples == 0) return kExitOk;
  const fs::path trace_dir = cfg.out / "traces";
  ensure_dir(trace_dir);
  std::size_t written = 0;
  for (const auto& r : rows) {
    const GridCell cell{r.snr_db, r.compression_rate};
    const auto test = dataset::load_dataset(split_file(cfg, cell.snr_db, "test"));
    const std::size_t n = std::min(rf.samples, test.size());
    std::vector<ComplexVec> noisy, clean;
    for (std::size_t i = 0; i < n; ++i) {
      noisy.push_back(dataset::to_physical(test.input(i), test.n_s(), test.header));
      clean.push_back(dataset::to_physical(test.label(i), test.n_s(), test.header));
    }
    std::vector<ComplexVec> est;
    if (r.method == "crnet") {
      auto model = load_model_for(cfg, cell, test);
      est = crnet::reconstruct_batch(model, noisy);
    } else if (r.method == "omp") {
      est = make_omp(cfg, cell, test.n_s())->reconstruct(noisy);
    } else {
      throw FormatError("metrics row names unknown method '" + r.method + "'");
    }
    for (std::size_t i = 0; i < n; ++i) {
      write_trace(trace_dir / (r.method + "_" + cell_tag(cell) + "_sample_" + std::to_string(i) + ".csv"),
                  clean[i], est[i]);
      ++written;
    }
  }
  out << "wrote " << written << " traces to " << trace_dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"THz wideband spectrum sensing: dataset generation, CRNet training, evaluation"};
  app.require_subcommand(1);

  SharedFlags sf;
  GenerateFlags gf;
  TrainFlags tf;
  EvalFlags ef;
  ReportFlags rf;

  auto* gen = app.add_subcommand("generate", "Generate train/val/test datasets for each grid SNR");
  add_shared(*gen, sf);
  gen->add_option("--ns", gf.ns, "Number of sub-bands n_s (default 256)");
  gen->add_option("--users", gf.users, "Active users per spectrum (default 8)");
  gen->add_option("--block", gf.block, "Bins occupied per user (default 5)");
  gen->add_option("--guard", gf.guard, "Idle guard bins on each side of a user block (default 1)");
  gen->add_option("--snr-db", gf.snr_db, "SNR(s) in dB; overrides the config grid")->delimiter(',');
  gen->add_option("--f-a", gf.f_a, "Band start in Hz (default 0.1e12)");
  gen->add_option("--f-b", gf.f_b, "Band end in Hz (default 0.64e12)");
  gen->add_option("--d-min", gf.d_min, "Minimum link distance in m (default 1)");
  gen->add_option("--d-max", gf.d_max, "Maximum link distance in m (default 10)");
  gen->add_option("--train", gf.train, "Training samples (default 10000)");
  gen->add_option("--val", gf.val, "Validation samples (default 2000)");
  gen->add_option("--test", gf.test, "Test samples (default 2000)");
  gen->add_flag("--no-noise", gf.no_noise, "Noiseless spectra (stored under snr_inf)");

  auto* trn = app.add_subcommand("train", "Train one CRNet per grid cell");
  add_shared(*trn, sf);
  trn->add_option("--snr-db", tf.snr_db, "Restrict to these SNRs")->delimiter(',');
  trn->add_option("--rate", tf.rate, "Restrict to these compression rates")->delimiter(',');
  trn->add_option("--epochs", tf.epochs, "Total epochs (default 20)");
  trn->add_option("--batch", tf.batch, "Mini-batch size (default 128)");
  trn->add_option("--lr", tf.lr, "Adam learning rate (default 0.0005)");
  trn->add_flag("--resume", tf.resume, "Continue from an existing checkpoint, including Adam state");

  auto* evl = app.add_subcommand("eval", "Evaluate methods on every grid cell and write metrics.csv");
  add_shared(*evl, sf);
  evl->add_option("--snr-db", ef.snr_db, "Restrict to these SNRs")->delimiter(',');
  evl->add_option("--rate", ef.rate, "Restrict to these compression rates")->delimiter(',');
  evl->add_option("--methods", ef.methods, "Methods to run: crnet, omp (default both)")->delimiter(',');
  evl->add_option("--threshold", ef.threshold, "Energy-detector threshold fraction of peak power (default 0.05)");
  evl->add_option("--max-sparsity", ef.max_sparsity, "OMP sparsity cap (default 40)");

  auto* rep = app.add_subcommand("report", "Print the metrics table and export magnitude traces");
  add_shared(*rep, sf);
  rep->add_option("--metrics", rf.metrics, "Metrics CSV (default <out>/metrics.csv)");
  rep->add_option("--samples", rf.samples, "Traces exported per row (default 3)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  for (auto* sub : {gen, trn, evl, rep}) {
    if (sub->parsed()) {
      sf.seed_given = sub->get_option("--seed")->count() > 0;
      sf.out_given = sub->get_option("--out")->count() > 0;
    }
  }

  try {
    if (gen->parsed()) return cmd_generate(sf, gf, *gen, out);
    if (trn->parsed()) return cmd_train(sf, tf, *trn, out);
    if (evl->parsed()) return cmd_eval(sf, ef, *evl, out);
    if (rep->parsed()) return cmd_report(sf, rf, out);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {  // ConfigError, ShapeError
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace thz::cli

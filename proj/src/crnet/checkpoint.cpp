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

#include "thz/crnet/checkpoint.hpp"

#include <bit>
#include <string>

#include "thz/autodiff/checkpoint.hpp"
#include "thz/common/errors.hpp"

namespace thz::crnet {

using ad::Blob;

namespace {

// 64-bit values travel as four exact 16-bit chunks.
std::vector<float> encode_u64(std::uint64_t v) {
  std::vector<float> out(4);
  for (int i = 0; i < 4; ++i) out[i] = static_cast<float>((v >> (16 * i)) & 0xFFFFu);
  return out;
}

std::uint64_t decode_u64(const float* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint64_t>(p[i]) << (16 * i);
  return v;
}

std::vector<float> encode_f64s(std::initializer_list<double> values) {
  std::vector<float> out;
  for (double d : values) {
    const auto chunk = encode_u64(std::bit_cast<std::uint64_t>(d));
    out.insert(out.end(), chunk.begin(), chunk.end());
  }
  return out;
}

double decode_f64(const Blob& b, std::size_t index) {
  if (b.data.size() < 4 * (index + 1)) throw FormatError("checkpoint blob " + b.name + " too short");
  return std::bit_cast<double>(decode_u64(b.data.data() + 4 * index));
}

std::vector<std::uint32_t> dims_of(const ad::Shape& s) {
  return {static_cast<std::uint32_t>(s.batch), static_cast<std::uint32_t>(s.channels),
          static_cast<std::uint32_t>(s.length)};
}

std::string bn_prefix(const ad::BatchNorm1dLayer<float>& bn) {
  const std::string& g = const_cast<ad::BatchNorm1dLayer<float>&>(bn).gamma().name;
  return g.substr(0, g.size() - std::string(".gamma").size());
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, CrnetModel<float>& model,
                     const Trainer* trainer, std::uint64_t shuffle_seed) {
  const CrnetConfig& c = model.config();
  std::vector<Blob> blobs;
  blobs.push_back({"meta.config", {9},
                   {float(c.n_s), float(c.n_m), float(c.residual_blocks), float(c.block_filters[0]),
                    float(c.block_filters[1]), float(c.block_filters[2]), float(c.kernel_size),
                    float(c.epochs), float(c.batch_size)}});
  blobs.push_back({"meta.lr", {4}, encode_f64s({c.lr})});
  blobs.push_back({"meta.seed", {4}, encode_u64(c.seed)});
  if (model.normalization) {
    blobs.push_back({"meta.norm", {8}, encode_f64s({model.normalization->min, model.normalization->max})});
  }

  for (ad::Parameter<float>* p : model.parameters()) {
    blobs.push_back({p->name, dims_of(p->value.shape()), p->value.storage()});
  }
  for (ad::BatchNorm1dLayer<float>* bn : model.batch_norms()) {
    const std::string prefix = bn_prefix(*bn);
    const auto& st = bn->stats();
    const auto n = static_cast<std::uint32_t>(st.running_mean.size());
    blobs.push_back({prefix + ".running_mean", {n}, st.running_mean});
    blobs.push_back({prefix + ".running_var", {n}, st.running_var});
    blobs.push_back({prefix + ".initialized", {1}, {st.initialized ? 1.0f : 0.0f}});
  }

  if (trainer != nullptr) {
    const ad::Adam<float>& adam = trainer->optimizer();
    const ad::AdamConfig& ac = adam.config();
    blobs.push_back({"adam.config", {16}, encode_f64s({ac.lr, ac.beta1, ac.beta2, ac.eps})});
    blobs.push_back({"adam.step", {4}, encode_u64(adam.step_count())});
    const auto params = model.parameters();
    for (std::size_t k = 0; k < adam.first_moments().size(); ++k) {
      const auto n = static_cast<std::uint32_t>(adam.first_moments()[k].size());
      blobs.push_back({"adam.m." + params.at(k)->name, {n}, adam.first_moments()[k]});
      blobs.push_back({"adam.v." + params.at(k)->name, {n}, adam.second_moments()[k]});
    }
    blobs.push_back({"train.epochs_completed", {4}, encode_u64(trainer->epochs_completed())});
    blobs.push_back({"train.shuffle_seed", {4}, encode_u64(shuffle_seed)});
    std::vector<float> hist;
    for (const EpochRecord& r : trainer->history()) {
      const auto e = encode_u64(r.epoch);
      hist.insert(hist.end(), e.begin(), e.end());
      const auto l = encode_f64s({r.train_loss, r.val_loss});
      hist.insert(hist.end(), l.begin(), l.end());
    }
    blobs.push_back({"train.history", {static_cast<std::uint32_t>(trainer->history().size()), 12}, hist});
  }
  ad::write_container(path, blobs);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::vector<Blob> blobs = ad::read_container(path);
  const Blob& meta = ad::find_blob(blobs, "meta.config");
  if (meta.data.size() != 9) throw FormatError(path.string() + ": meta.config has wrong size");
  CrnetConfig cfg;
  cfg.n_s = static_cast<std::size_t>(meta.data[0]);
  cfg.n_m = static_cast<std::size_t>(meta.data[1]);
  cfg.residual_blocks = static_cast<std::size_t>(meta.data[2]);
  cfg.block_filters = {static_cast<std::size_t>(meta.data[3]), static_cast<std::size_t>(meta.data[4]),
                       static_cast<std::size_t>(meta.data[5])};
  cfg.kernel_size = static_cast<std::size_t>(meta.data[6]);
  cfg.epochs = static_cast<std::size_t>(meta.data[7]);
  cfg.batch_size = static_cast<std::size_t>(meta.data[8]);
  cfg.lr = decode_f64(ad::find_blob(blobs, "meta.lr"), 0);
  cfg.seed = decode_u64(ad::find_blob(blobs, "meta.seed").data.data());

  Checkpoint ck{CrnetModel<float>(cfg, 0), {}, 0, {}, {}, 0, 0, {}};
  CrnetModel<float>& model = ck.model;
  if (const Blob* norm = ad::find_blob_or_null(blobs, "meta.norm")) {
    model.normalization = Normalization{decode_f64(*norm, 0), decode_f64(*norm, 1)};
  }
  for (ad::Parameter<float>* p : model.parameters()) {
    const Blob& b = ad::find_blob(blobs, p->name);
    if (b.dims != dims_of(p->value.shape())) {
      throw FormatError(path.string() + ": parameter " + p->name + " has unexpected shape");
    }
    p->value.storage() = b.data;
  }
  for (ad::BatchNorm1dLayer<float>* bn : model.batch_norms()) {
    const std::string prefix = bn_prefix(*bn);
    auto& st = bn->stats();
    st.running_mean = ad::find_blob(blobs, prefix + ".running_mean").data;
    st.running_var = ad::find_blob(blobs, prefix + ".running_var").data;
    st.initialized = ad::find_blob(blobs, prefix + ".initialized").data.at(0) != 0.0f;
    if (st.running_mean.size() != bn->channels() || st.running_var.size() != bn->channels()) {
      throw FormatError(path.string() + ": running statistics of " + prefix + " have wrong size");
    }
  }
  model.set_training(false);

  if (const Blob* ac = ad::find_blob_or_null(blobs, "adam.config")) {
    ck.adam_config = ad::AdamConfig{decode_f64(*ac, 0), decode_f64(*ac, 1), decode_f64(*ac, 2),
                                    decode_f64(*ac, 3)};
    ck.adam_steps = decode_u64(ad::find_blob(blobs, "adam.step").data.data());
    if (ck.adam_steps > 0) {
      for (ad::Parameter<float>* p : model.parameters()) {
        ck.adam_m.push_back(ad::find_blob(blobs, "adam.m." + p->name).data);
        ck.adam_v.push_back(ad::find_blob(blobs, "adam.v." + p->name).data);
      }
    }
    ck.epochs_completed = decode_u64(ad::find_blob(blobs, "train.epochs_completed").data.data());
    ck.shuffle_seed = decode_u64(ad::find_blob(blobs, "train.shuffle_seed").data.data());
    const Blob& h = ad::find_blob(blobs, "train.history");
    for (std::size_t i = 0; i + 12 <= h.data.size(); i += 12) {
      EpochRecord r;
      r.epoch = decode_u64(h.data.data() + i);
      r.train_loss = std::bit_cast<double>(decode_u64(h.data.data() + i + 4));
      r.val_loss = std::bit_cast<double>(decode_u64(h.data.data() + i + 8));
      ck.history.push_back(r);
    }
  } else {
    ck.adam_config.lr = cfg.lr;
  }
  return ck;
}

void restore_trainer(const Checkpoint& ckpt, Trainer& trainer) {
  trainer.optimizer() = ad::Adam<float>(ckpt.adam_config);
  if (ckpt.adam_steps > 0) trainer.optimizer().restore(ckpt.adam_steps, ckpt.adam_m, ckpt.adam_v);
  trainer.set_epochs_completed(ckpt.epochs_completed);
  trainer.set_history(ckpt.history);
}

}  // namespace thz::crnet

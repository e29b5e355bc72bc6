// Copyright 2026 The amenet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "amenet/model.hpp"

#include <cmath>
#include <stdexcept>

namespace amenet {

using nn::Matrix;
using nn::Var;

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kENet: return "ENet";
    case Variant::kOENet: return "OENet";
    case Variant::kAOENet: return "AOENet";
    case Variant::kMENet: return "MENet";
    case Variant::kACVAE: return "ACVAE";
    case Variant::kAMENet: return "AMENet";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : kAllVariants) {
    if (to_string(v) == name) return v;
  }
  throw std::invalid_argument("unknown model variant '" + name +
                              "' (expected ENet, OENet, AOENet, MENet, ACVAE or AMENet)");
}

std::string to_string(LossSpace s) { return s == LossSpace::kOffsets ? "offsets" : "positions"; }

LossSpace parse_loss_space(const std::string& name) {
  if (name == "offsets") return LossSpace::kOffsets;
  if (name == "positions") return LossSpace::kPositions;
  throw std::invalid_argument("unknown loss space '" + name + "' (expected offsets or positions)");
}

void ModelConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(obs_len >= 1 && pred_len >= 1, "obs_len and pred_len must be >= 1");
  require(z_dim >= 1, "z_dim must be >= 1");
  require(hidden >= 1 && fusion_dim >= 1, "hidden and fusion_dim must be >= 1");
  require(conv1d_filters >= 1 && conv2d_filters >= 1, "filter counts must be >= 1");
  require(conv1d_width >= 1 && conv1d_width % 2 == 1, "conv1d_width must be odd");
  require(conv2d_kernel >= 1 && conv2d_kernel % 2 == 1, "conv2d_kernel must be odd");
  require(pool >= 1, "pool must be >= 1");
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  require(lr > 0.0, "lr must be positive");
  require(batch >= 1, "batch must be >= 1");
  require(d_q == d_k, "d_q must equal d_k");
  require(heads >= 1 && d_q % heads == 0 && d_v % heads == 0, "heads must divide d_q and d_v");
  if (uses_maps()) require(map.grid_size() >= pool, "map grid smaller than the pooling window");
  if (interaction == InteractionSource::kNone) {
    require(!y_maps, "a map-free variant cannot read future maps");
  }
}

ModelConfig make_variant(Variant v) {
  ModelConfig cfg;
  cfg.variant = v;
  switch (v) {
    case Variant::kENet:
      cfg.interaction = InteractionSource::kNone;
      cfg.attention = false;
      cfg.y_maps = false;
      break;
    case Variant::kOENet:
      cfg.interaction = InteractionSource::kOccupancy;
      cfg.attention = false;
      break;
    case Variant::kAOENet:
      cfg.interaction = InteractionSource::kOccupancy;
      break;
    case Variant::kMENet:
      cfg.attention = false;
      break;
    case Variant::kACVAE:
      cfg.y_maps = false;
      break;
    case Variant::kAMENet:
      break;
  }
  return cfg;
}

ModelConfig make_variant(const std::string& name) { return make_variant(parse_variant(name)); }

Eigen::VectorXd reparameterize(const LatentDist& dist, const Eigen::VectorXd& eps) {
  if (dist.mu.size() != dist.log_var.size() || eps.size() != dist.mu.size()) {
    throw std::invalid_argument("reparameterize: dimension mismatch");
  }
  return dist.mu.array() + (0.5 * dist.log_var.array()).exp() * eps.array();
}

double kl_to_prior(const LatentDist& dist) {
  const auto& lv = dist.log_var.array();
  return -0.5 * (1.0 + lv - dist.mu.array().square() - lv.exp()).sum();
}

GridSeq MapCache::get(const std::string& window_id, std::span<const FrameState> frames,
                      AgentId target, bool future, InteractionSource source) {
  if (source == InteractionSource::kNone) return nullptr;
  const std::string key = window_id + (future ? "|fut|" : "|obs|") +
                          (source == InteractionSource::kDynamic ? "dyn" : "occ");
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  auto grids = std::make_shared<std::vector<GridTensor>>();
  grids->reserve(frames.size());
  if (source == InteractionSource::kDynamic) {
    for (auto& m : maps::map_sequence(frames, target, cfg_)) grids->push_back(std::move(m.grid));
  } else {
    for (auto& m : maps::occupancy_sequence(frames, target, cfg_)) grids->push_back(std::move(m.grid));
  }
  GridSeq out = std::move(grids);
  cache_.emplace(key, out);
  return out;
}

namespace {

GridSeq fetch_grids(MapCache* cache, const ModelConfig& cfg, const std::string& id,
                    std::span<const FrameState> frames, AgentId target, bool future) {
  if (!cfg.uses_maps()) return nullptr;
  if (cache) {
    if (cache->config().extent_m != cfg.map.extent_m || cache->config().cell_m != cfg.map.cell_m ||
        cache->config().position_layer != cfg.map.position_layer) {
      throw std::invalid_argument("map cache configuration differs from the model's");
    }
    return cache->get(id, frames, target, future, cfg.interaction);
  }
  MapCache local(cfg.map);
  return local.get(id, frames, target, future, cfg.interaction);
}

Matrix offsets_matrix(std::span<const Vec2> d) {
  Matrix m(static_cast<Eigen::Index>(d.size()), 2);
  for (std::size_t i = 0; i < d.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = d[i].x;
    m(static_cast<Eigen::Index>(i), 1) = d[i].y;
  }
  return m;
}

Matrix observed_offsets(std::span<const FrameState> frames) {
  std::vector<Vec2> d;
  d.reserve(frames.size());
  for (const auto& fs : frames) d.push_back(fs.target_offset);
  return offsets_matrix(d);
}

}  // namespace

WindowFeatures observed_features(const ObservedWindow& w, const ModelConfig& cfg, MapCache* cache) {
  if (static_cast<int>(w.obs.size()) != cfg.obs_len || w.frames.size() != w.obs.size()) {
    throw nn::ContractError("window '" + w.id + "' has " + std::to_string(w.obs.size()) +
                            " observed steps, model expects " + std::to_string(cfg.obs_len));
  }
  WindowFeatures f;
  f.id = w.id;
  f.scene = w.scene;
  f.target = w.target;
  f.start_frame = w.start_frame;
  f.last_obs = w.obs.back();
  f.obs_offsets = observed_offsets(w.frames);
  f.obs_grids = fetch_grids(cache, cfg, w.id, w.frames, w.target, false);
  return f;
}

WindowFeatures training_features(const Window& w, const ModelConfig& cfg, MapCache* cache) {
  if (static_cast<int>(w.pred_len()) != cfg.pred_len) {
    throw nn::ContractError("window '" + w.id + "' has " + std::to_string(w.pred_len()) +
                            " future steps, model expects " + std::to_string(cfg.pred_len));
  }
  WindowFeatures f = observed_features(w.observed(), cfg, cache);
  f.fut = w.fut;
  f.fut_offsets = offsets_matrix(w.future_offsets());
  if (cfg.y_maps) f.fut_grids = fetch_grids(cache, cfg, w.id, w.fut_frames(), w.target, true);
  return f;
}

Amenet::Encoder Amenet::build_encoder(const std::string& name, bool maps, std::mt19937_64& rng) {
  Encoder e;
  const int h = cfg_.hidden;
  e.conv1d = nn::Conv1dTime(store_, name + ".conv1d", 2, cfg_.conv1d_filters, cfg_.conv1d_width, rng);
  e.motion_fc = nn::Linear(store_, name + ".motion_fc", cfg_.conv1d_filters, h, rng);
  e.motion_lstm = nn::Lstm(store_, name + ".motion_lstm", h, h, rng);
  int fuse_in = h;
  if (maps) {
    e.has_maps = true;
    nn::Conv2dPoolConfig cc;
    cc.in_channels = cfg_.map_channels();
    cc.filters = cfg_.conv2d_filters;
    cc.kernel = cfg_.conv2d_kernel;
    cc.pool = cfg_.pool;
    e.conv2d = nn::Conv2dPool(store_, name + ".conv2d", cc, rng);
    const int n = cfg_.map.grid_size();
    const int feat = cc.output_size(n, n);
    if (cfg_.attention) {
      e.has_attention = true;
      nn::AttentionConfig ac;
      ac.model_dim = feat;
      ac.d_q = cfg_.d_q;
      ac.d_k = cfg_.d_k;
      ac.d_v = cfg_.d_v;
      ac.heads = cfg_.heads;
      ac.out_dim = h;
      e.attention = nn::MultiHeadAttention(store_, name + ".attention", ac, rng);
    } else {
      e.map_fc = nn::Linear(store_, name + ".map_fc", feat, h, rng);
    }
    e.map_lstm = nn::Lstm(store_, name + ".map_lstm", h, h, rng);
    fuse_in += h;
  }
  e.fuse = nn::Linear(store_, name + ".fuse", fuse_in, cfg_.fusion_dim, rng);
  return e;
}

Amenet::Amenet(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  std::mt19937_64 rng(seed);
  const int h = cfg_.hidden;
  x_enc_ = build_encoder("x_encoder", cfg_.uses_maps(), rng);
  y_enc_ = build_encoder("y_encoder", cfg_.y_maps, rng);
  latent_fc1_ = nn::Linear(store_, "latent.fc1", 2 * cfg_.fusion_dim, h, rng);
  latent_fc2_ = nn::Linear(store_, "latent.fc2", h, h, rng);
  mu_head_ = nn::Linear(store_, "latent.mu", h, cfg_.z_dim, rng);
  log_var_head_ = nn::Linear(store_, "latent.log_var", h, cfg_.z_dim, rng);
  decoder_ = nn::Lstm(store_, "decoder.lstm", cfg_.fusion_dim + cfg_.z_dim, h, rng);
  dec_h0_ = store_.create_zero("decoder.h0", 1, h);
  dec_c0_ = store_.create_zero("decoder.c0", 1, h);
  dec_out_ = nn::Linear(store_, "decoder.out", h, 2, rng);
}

Var Amenet::run_encoder(const Encoder& e, const Matrix& offsets, const GridSeq& grids) const {
  const Var motion = nn::relu(e.motion_fc.forward(nn::relu(e.conv1d.forward(nn::constant(offsets)))));
  Var feat = e.motion_lstm.forward(motion).last_h;
  if (e.has_maps) {
    if (!grids || static_cast<Eigen::Index>(grids->size()) != offsets.rows()) {
      throw nn::ContractError("encoder: map sequence missing or of the wrong length");
    }
    const Var pooled = e.conv2d.forward(*grids);
    const Var attended = e.has_attention ? e.attention.forward(pooled) : e.map_fc.forward(pooled);
    const Var map_h = e.map_lstm.forward(attended).last_h;
    const Var parts[] = {feat, map_h};
    feat = nn::hcat(parts);
  }
  return nn::relu(e.fuse.forward(feat));
}

Var Amenet::encode_x(const WindowFeatures& f) const {
  if (f.obs_offsets.rows() != cfg_.obs_len || f.obs_offsets.cols() != 2) {
    throw nn::ContractError("encode_x: expected " + std::to_string(cfg_.obs_len) + "x2 offsets");
  }
  return run_encoder(x_enc_, f.obs_offsets, f.obs_grids);
}

Var Amenet::encode_y(const WindowFeatures& f) const {
  if (f.fut_offsets.rows() != cfg_.pred_len || f.fut_offsets.cols() != 2) {
    throw nn::ContractError("encode_y: expected " + std::to_string(cfg_.pred_len) + "x2 offsets");
  }
  return run_encoder(y_enc_, f.fut_offsets, f.fut_grids);
}

LatentVars Amenet::latent(const Var& phi_x, const Var& phi_y) const {
  const Var parts[] = {phi_x, phi_y};
  const Var h = nn::relu(latent_fc2_.forward(nn::relu(latent_fc1_.forward(nn::hcat(parts)))));
  return {mu_head_.forward(h), log_var_head_.forward(h)};
}

Var Amenet::decode(const Var& phi_x, const Var& z) const {
  if (z.rows() != 1 || z.cols() != cfg_.z_dim) throw nn::ContractError("decode: z must be 1 x z_dim");
  const Var parts[] = {phi_x, z};
  const Var step_in = nn::repeat_rows(nn::hcat(parts), cfg_.pred_len);
  return dec_out_.forward(decoder_.forward(step_in, dec_h0_, dec_c0_).hidden);
}

LossTerms vae_loss(const Var& pred_offsets, const Matrix& gt_offsets, const Var& mu,
                   const Var& log_var, double beta, LossSpace space) {
  if (pred_offsets.rows() != gt_offsets.rows() || pred_offsets.cols() != gt_offsets.cols()) {
    throw nn::ContractError("loss: prediction and ground truth shapes differ");
  }
  Var diff;
  if (space == LossSpace::kOffsets) {
    diff = nn::sub(pred_offsets, nn::constant(gt_offsets));
  } else {
    const Eigen::Index n = gt_offsets.rows();
    const Matrix cumsum = Matrix::Ones(n, n).triangularView<Eigen::Lower>();
    diff = nn::matmul(nn::constant(cumsum), nn::sub(pred_offsets, nn::constant(gt_offsets)));
  }
  LossTerms t;
  t.mse = nn::mean(nn::square(diff));
  const Var inner = nn::sub(nn::sub(nn::add_scalar(log_var, 1.0), nn::square(mu)), nn::exp(log_var));
  t.kl = nn::scale(nn::sum(inner), -0.5);
  t.total = nn::add(nn::scale(t.mse, beta), nn::scale(t.kl, 1.0 - beta));
  return t;
}

LossTerms Amenet::loss(const WindowFeatures& f, const Eigen::VectorXd& eps) const {
  if (eps.size() != cfg_.z_dim) throw nn::ContractError("loss: eps must have z_dim entries");
  const Var phi_x = encode_x(f);
  const LatentVars q = latent(phi_x, encode_y(f));
  const Matrix eps_row = eps.transpose();
  const Var z = nn::add(q.mu, nn::mul(nn::exp(nn::scale(q.log_var, 0.5)), nn::constant(eps_row)));
  return vae_loss(decode(phi_x, z), f.fut_offsets, q.mu, q.log_var, cfg_.beta, cfg_.loss_space);
}

std::uint64_t window_seed(std::uint64_t seed, const std::string& window_id) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : window_id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  // splitmix64 finalizer
  std::uint64_t x = seed ^ h;
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

PredictionSet sample_predictions(const Amenet& model, const WindowFeatures& observed, int n,
                                 std::uint64_t seed, bool prior_mean) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  nn::NoGradGuard no_grad;
  const int zd = model.config().z_dim;
  PredictionSet out;
  out.window = observed.id;
  out.scene = observed.scene;
  out.target = observed.target;
  out.start_frame = observed.start_frame;
  const Var phi_x = model.encode_x(observed);
  std::mt19937_64 rng(window_seed(seed, observed.id));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < n; ++s) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(zd);
    if (!prior_mean) {
      for (int j = 0; j < zd; ++j) z(j) = normal(rng);
    }
    const Matrix z_row = z.transpose();
    const Matrix off = model.decode(phi_x, nn::constant(z_row)).value();
    std::vector<Vec2> path;
    path.reserve(static_cast<std::size_t>(off.rows()));
    Vec2 p = observed.last_obs;
    for (Eigen::Index t = 0; t < off.rows(); ++t) {
      p = p + Vec2{off(t, 0), off(t, 1)};
      path.push_back(p);
    }
    out.samples.push_back(std::move(path));
    out.z.push_back(std::move(z));
  }
  return out;
}

}  // namespace amenet

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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "amenet/data_io.hpp"
#include "amenet/layers.hpp"
#include "amenet/maps.hpp"
#include "amenet/param_store.hpp"
#include "amenet/prediction.hpp"

namespace amenet {

enum class Variant { kENet, kOENet, kAOENet, kMENet, kACVAE, kAMENet };

/// Where the map branch gets its per-step grids from.
enum class InteractionSource { kNone, kOccupancy, kDynamic };

/// Space in which the reconstruction MSE is measured.
enum class LossSpace { kOffsets, kPositions };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);
std::string to_string(LossSpace s);
LossSpace parse_loss_space(const std::string& name);
inline constexpr Variant kAllVariants[] = {Variant::kENet,  Variant::kOENet, Variant::kAOENet,
                                           Variant::kMENet, Variant::kACVAE, Variant::kAMENet};

struct ModelConfig {
  Variant variant = Variant::kAMENet;
  InteractionSource interaction = InteractionSource::kDynamic;
  bool attention = true;
  bool y_maps = true;  // the Y-Encoder also reads future maps

  int obs_len = 8;
  int pred_len = 12;
  int z_dim = 2;
  int hidden = 32;
  int fusion_dim = 32;
  int conv1d_filters = 16;
  int conv1d_width = 3;
  int conv2d_filters = 16;
  int conv2d_kernel = 3;
  int pool = 2;
  int d_q = 4;
  int d_k = 4;
  int d_v = 4;
  int heads = 2;

  double beta = 0.8;
  double lr = 1e-3;
  int batch = 64;
  LossSpace loss_space = LossSpace::kOffsets;
  maps::MapConfig map;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  bool uses_maps() const { return interaction != InteractionSource::kNone; }
  int map_channels() const { return interaction == InteractionSource::kOccupancy ? 1 : 3; }
};

/// Default configuration of one of the six ablation variants.
ModelConfig make_variant(Variant v);
ModelConfig make_variant(const std::string& name);

/// Diagonal Gaussian over the latent code.
struct LatentDist {
  Eigen::VectorXd mu;
  Eigen::VectorXd log_var;
};

/// z = mu + exp(log_var / 2) * eps.
Eigen::VectorXd reparameterize(const LatentDist& dist, const Eigen::VectorXd& eps);

/// KL(N(mu, exp(log_var)) || N(0, I)) in closed form.
double kl_to_prior(const LatentDist& dist);

/// Grids for one span of a window, shared between every consumer that asks
/// for the same (window, span, source).
using GridSeq = std::shared_ptr<const std::vector<GridTensor>>;

/// Memoizes per-window map sequences. Not thread-safe.
class MapCache {
 public:
  explicit MapCache(maps::MapConfig cfg) : cfg_(cfg) {}
  GridSeq get(const std::string& window_id, std::span<const FrameState> frames, AgentId target,
              bool future, InteractionSource source);
  const maps::MapConfig& config() const { return cfg_; }
  std::size_t size() const { return cache_.size(); }

 private:
  maps::MapConfig cfg_;
  std::map<std::string, GridSeq> cache_;
};

/// Model inputs derived from a window. Future fields are empty for
/// observation-only inputs.
struct WindowFeatures {
  std::string id;
  std::string scene;
  AgentId target = 0;
  std::int64_t start_frame = 0;
  Vec2 last_obs;
  nn::Matrix obs_offsets;  // T x 2, per-step displacement of the target
  GridSeq obs_grids;
  nn::Matrix fut_offsets;  // T' x 2, from the last observed position
  GridSeq fut_grids;
  std::vector<Vec2> fut;
};

WindowFeatures observed_features(const ObservedWindow& w, const ModelConfig& cfg, MapCache* cache);
WindowFeatures training_features(const Window& w, const ModelConfig& cfg, MapCache* cache);

struct LossTerms {
  nn::Var total;
  nn::Var mse;
  nn::Var kl;
};

struct LatentVars {
  nn::Var mu;       // 1 x z
  nn::Var log_var;  // 1 x z
};

/// The conditional VAE: X-Encoder, Y-Encoder (training only), latent head and
/// LSTM decoder, all parameters in one store.
class Amenet {
 public:
  Amenet(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  nn::ParamStore& params() { return store_; }
  const nn::ParamStore& params() const { return store_; }

  nn::Var encode_x(const WindowFeatures& f) const;  // 1 x fusion_dim
  nn::Var encode_y(const WindowFeatures& f) const;  // 1 x fusion_dim
  LatentVars latent(const nn::Var& phi_x, const nn::Var& phi_y) const;
  nn::Var decode(const nn::Var& phi_x, const nn::Var& z) const;  // T' x 2 offsets
  /// Training objective for one window with the given standard-normal draw.
  LossTerms loss(const WindowFeatures& f, const Eigen::VectorXd& eps) const;

 private:
  struct Encoder {
    nn::Conv1dTime conv1d;
    nn::Linear motion_fc;
    nn::Lstm motion_lstm;
    bool has_maps = false;
    nn::Conv2dPool conv2d;
    bool has_attention = false;
    nn::MultiHeadAttention attention;
    nn::Linear map_fc;  // stands in for attention when it is switched off
    nn::Lstm map_lstm;
    nn::Linear fuse;
  };

  Encoder build_encoder(const std::string& name, bool maps, std::mt19937_64& rng);
  nn::Var run_encoder(const Encoder& e, const nn::Matrix& offsets, const GridSeq& grids) const;

  ModelConfig cfg_;
  nn::ParamStore store_;
  Encoder x_enc_;
  Encoder y_enc_;
  nn::Linear latent_fc1_;
  nn::Linear latent_fc2_;
  nn::Linear mu_head_;
  nn::Linear log_var_head_;
  nn::Lstm decoder_;
  nn::Var dec_h0_;
  nn::Var dec_c0_;
  nn::Linear dec_out_;
};

/// Reconstruction + KL objective, beta * MSE + (1 - beta) * KL.
LossTerms vae_loss(const nn::Var& pred_offsets, const nn::Matrix& gt_offsets, const nn::Var& mu,
                   const nn::Var& log_var, double beta, LossSpace space);

/// Stream seed for a window, so results do not depend on evaluation order.
std::uint64_t window_seed(std::uint64_t seed, const std::string& window_id);

/// N futures conditioned on the observation only, z ~ N(0, I). With
/// `prior_mean` every sample uses z = 0.
PredictionSet sample_predictions(const Amenet& model, const WindowFeatures& observed, int n,
                                 std::uint64_t seed, bool prior_mean = false);

struct TrainOptions {
  int steps = 2000;
  std::uint64_t seed = 0;
  /// Called after each optimizer step; return false to stop early.
  std::function<bool(long step, double loss)> on_step;
};

struct LossRecord {
  long step = 0;
  double loss = 0.0;
  double mse = 0.0;
  double kl = 0.0;
};

struct TrainResult {
  std::vector<LossRecord> history;  // per optimizer step
  std::vector<LossRecord> epochs;   // means over each pass through the data
};

/// Raised when the loss or a parameter stops being finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mini-batch Adam. Deterministic given the seed: the shuffle order and the
/// eps draws come from one generator.
TrainResult train(Amenet& model, std::span<const WindowFeatures> data, const TrainOptions& opts);

/// Mean ADE of the prior-mean (z = 0) prediction against the ground truth.
double prior_mean_ade(const Amenet& model, std::span<const WindowFeatures> data);

}  // namespace amenet

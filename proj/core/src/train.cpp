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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "amenet/metrics.hpp"
#include "amenet/model.hpp"

namespace amenet {

TrainResult train(Amenet& model, std::span<const WindowFeatures> data, const TrainOptions& opts) {
  if (data.empty()) throw std::invalid_argument("training set is empty");
  if (opts.steps < 0) throw std::invalid_argument("steps must be >= 0");
  const ModelConfig& cfg = model.config();
  nn::ParamStore& store = model.params();
  nn::Adam adam(store, nn::AdamOptions{cfg.lr, 0.9, 0.999, 1e-8});

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch), data.size());

  TrainResult result;
  std::size_t cursor = order.size();  // forces a shuffle on the first step
  LossRecord epoch_sum;
  long epoch_steps = 0;
  auto close_epoch = [&] {
    if (epoch_steps == 0) return;
    const double n = static_cast<double>(epoch_steps);
    result.epochs.push_back({epoch_sum.step, epoch_sum.loss / n, epoch_sum.mse / n, epoch_sum.kl / n});
    epoch_sum = {};
    epoch_steps = 0;
  };

  for (long step = 1; step <= opts.steps; ++step) {
    if (cursor + batch > order.size()) {
      close_epoch();
      std::shuffle(order.begin(), order.end(), rng);
      cursor = 0;
    }
    store.zero_grad();
    double loss = 0.0, mse = 0.0, kl = 0.0;
    const double inv = 1.0 / static_cast<double>(batch);
    for (std::size_t b = 0; b < batch; ++b) {
      const WindowFeatures& f = data[order[cursor + b]];
      Eigen::VectorXd eps(cfg.z_dim);
      for (int j = 0; j < cfg.z_dim; ++j) eps(j) = normal(rng);
      const LossTerms t = model.loss(f, eps);
      nn::backward(t.total, inv);
      loss += t.total.scalar() * inv;
      mse += t.mse.scalar() * inv;
      kl += t.kl.scalar() * inv;
    }
    cursor += batch;
    if (!std::isfinite(loss)) {
      throw DivergenceError("loss became non-finite at step " + std::to_string(step));
    }
    adam.step();
    try {
      store.check_finite();
    } catch (const std::runtime_error& e) {
      throw DivergenceError(std::string(e.what()) + " after step " + std::to_string(step));
    }
    result.history.push_back({step, loss, mse, kl});
    epoch_sum.step = step;
    epoch_sum.loss += loss;
    epoch_sum.mse += mse;
    epoch_sum.kl += kl;
    ++epoch_steps;
    if (opts.on_step && !opts.on_step(step, loss)) break;
  }
  close_epoch();
  return result;
}

double prior_mean_ade(const Amenet& model, std::span<const WindowFeatures> data) {
  if (data.empty()) throw std::invalid_argument("no windows to score");
  double total = 0.0;
  for (const auto& f : data) {
    const PredictionSet p = sample_predictions(model, f, 1, 0, true);
    total += ade(p.samples[0], f.fut);
  }
  return total / static_cast<double>(data.size());
}

}  // namespace amenet

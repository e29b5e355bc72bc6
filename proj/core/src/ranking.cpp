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

#include "amenet/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace amenet {

BiGauss fit_bigauss(std::span<const Vec2> points, const RankOptions& opts) {
  if (points.size() < 2) throw std::invalid_argument("fit_bigauss needs at least 2 points");
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double dx = p.x - mx, dy = p.y - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  const double sx = std::sqrt(sxx / n);
  const double sy = std::sqrt(syy / n);
  double rho = 0.0;
  if (sx > 0.0 && sy > 0.0) rho = (sxy / n) / (sx * sy);
  BiGauss g;
  g.mu_x = mx;
  g.mu_y = my;
  g.sigma_x = std::max(sx, opts.sigma_floor);
  g.sigma_y = std::max(sy, opts.sigma_floor);
  g.rho = std::clamp(rho, -opts.rho_clamp, opts.rho_clamp);
  return g;
}

double bigauss_log_density(Vec2 p, const BiGauss& g) {
  const double dx = (p.x - g.mu_x) / g.sigma_x;
  const double dy = (p.y - g.mu_y) / g.sigma_y;
  const double one_minus = 1.0 - g.rho * g.rho;
  const double z = dx * dx + dy * dy - 2.0 * g.rho * dx * dy;
  return -z / (2.0 * one_minus) -
         std::log(2.0 * std::numbers::pi * g.sigma_x * g.sigma_y * std::sqrt(one_minus));
}

double bigauss_density(Vec2 p, const BiGauss& g) {
  const double dx = (p.x - g.mu_x) / g.sigma_x;
  const double dy = (p.y - g.mu_y) / g.sigma_y;
  const double one_minus = 1.0 - g.rho * g.rho;
  const double z = dx * dx + dy * dy - 2.0 * g.rho * dx * dy;
  return std::exp(-z / (2.0 * one_minus)) /
         (2.0 * std::numbers::pi * g.sigma_x * g.sigma_y * std::sqrt(one_minus));
}

Ranking rank(const std::vector<std::vector<Vec2>>& samples, const RankOptions& opts) {
  Ranking r;
  if (samples.empty()) throw std::invalid_argument("rank: no samples");
  if (samples.size() < 2) return r;
  const std::size_t steps = samples[0].size();
  for (const auto& s : samples) {
    if (s.size() != steps) throw std::invalid_argument("rank: samples differ in length");
  }
  r.scored = true;
  r.scores.assign(samples.size(), 0.0);
  std::vector<Vec2> cloud(samples.size());
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t n = 0; n < samples.size(); ++n) cloud[n] = samples[n][t];
    const BiGauss g = fit_bigauss(cloud, opts);
    for (std::size_t n = 0; n < samples.size(); ++n) {
      r.scores[n] += opts.mode == ScoreMode::kDensitySum ? bigauss_density(cloud[n], g)
                                                         : bigauss_log_density(cloud[n], g);
    }
  }
  for (std::size_t n = 1; n < r.scores.size(); ++n) {
    if (r.scores[n] > r.scores[r.most_likely]) r.most_likely = n;
  }
  return r;
}

Ranking rank(const PredictionSet& set, const RankOptions& opts) { return rank(set.samples, opts); }

}  // namespace amenet

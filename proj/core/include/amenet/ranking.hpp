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

#include <cstddef>
#include <span>
#include <vector>

#include "amenet/prediction.hpp"
#include "amenet/traj.hpp"

namespace amenet {

struct BiGauss {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double rho = 0.0;
};

enum class ScoreMode {
  kDensitySum,     // sum of per-step densities
  kLogDensitySum,  // sum of per-step log densities
};

struct RankOptions {
  double sigma_floor = 1e-6;  // meters
  double rho_clamp = 0.999;
  ScoreMode mode = ScoreMode::kDensitySum;
};

/// Population moments of the points. Sigmas are floored and rho clamped so
/// the density stays finite for degenerate clouds. Needs at least 2 points.
BiGauss fit_bigauss(std::span<const Vec2> points, const RankOptions& opts = {});

double bigauss_density(Vec2 p, const BiGauss& g);
double bigauss_log_density(Vec2 p, const BiGauss& g);

struct Ranking {
  std::vector<double> scores;  // one per sample; empty when not scored
  std::size_t most_likely = 0;
  bool scored = false;         // false when fewer than two samples exist
};

/// Fits one Gaussian per future step over the samples and scores each sample
/// by its summed likelihood. Ties go to the lowest index.
Ranking rank(const std::vector<std::vector<Vec2>>& samples, const RankOptions& opts = {});
Ranking rank(const PredictionSet& set, const RankOptions& opts = {});

}  // namespace amenet

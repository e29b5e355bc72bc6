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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "amenet/config.hpp"
#include "amenet/data_io.hpp"
#include "amenet/prediction.hpp"
#include "amenet/ranking.hpp"

namespace amenet {

/// Mean per-step Euclidean distance. Throws std::invalid_argument on a
/// length mismatch or empty input.
double ade(std::span<const Vec2> pred, std::span<const Vec2> gt);
/// Distance at the last step.
double fde(std::span<const Vec2> pred, std::span<const Vec2> gt);

struct BestOf {
  std::size_t index = 0;
  double ade = 0.0;
  double fde = 0.0;
};

/// Sample with the smallest ADE; ties go to the smaller FDE, then the lowest
/// index.
BestOf best_of(const std::vector<std::vector<Vec2>>& samples, std::span<const Vec2> gt);

struct CollisionResult {
  int pairs = 0;               // colliding pairs, each counted once
  std::vector<bool> invalid;   // per trajectory: involved in any collision
  int invalid_count = 0;
};

/// Checks every pair of equally clocked paths at each step and at
/// `substeps` evenly spaced linear interpolations inside each interval. A
/// pair collides when its distance drops below `threshold_m`.
CollisionResult count_collisions(const std::vector<std::vector<Vec2>>& paths, double threshold_m,
                                 int substeps = 1);

/// Smallest distance between two equally clocked paths over the sampled
/// instants (endpoints plus `substeps` interior points per interval).
double min_pair_distance(std::span<const Vec2> a, std::span<const Vec2> b, int substeps);

enum class CollisionMode { kMostLikely, kPerSample };
/// What predictions are checked against: other predicted targets of the same
/// scene and start frame, or the ground-truth neighbors inside each window.
enum class CollisionPartner { kPredicted, kGroundTruth };

struct EvalOptions {
  double collision_threshold = 0.1;
  int substeps = 1;
  CollisionMode collision_mode = CollisionMode::kMostLikely;
  CollisionPartner collision_partner = CollisionPartner::kPredicted;
  RankOptions rank;
  double linearity_threshold = kDefaultLinearityThreshold;
};

struct WindowResult {
  std::string id;
  std::string scene;
  Linearity linearity = Linearity::kLinear;
  std::size_t most_likely = 0;
  bool ranked = false;
  std::size_t best = 0;
  double ade_most_likely = 0.0;
  double fde_most_likely = 0.0;
  double ade_top = 0.0;
  double fde_top = 0.0;
};

struct Aggregate {
  std::size_t window_count = 0;
  double ade_most_likely = 0.0;
  double fde_most_likely = 0.0;
  double ade_top10 = 0.0;
  double fde_top10 = 0.0;
  int collision_count = 0;
  int invalid_count = 0;
};

struct MetricsReport {
  Aggregate overall;
  std::map<std::string, Aggregate> per_scene;
  Aggregate linear;
  Aggregate nonlinear;
  std::vector<WindowResult> windows;
  std::vector<std::string> missing;  // test windows without predictions
  KeyValues config;                  // echoed settings
};

/// Ranks, scores and aggregates predictions against the test windows. Windows
/// without a prediction set are listed in `missing` and skipped.
MetricsReport evaluate(std::span<const Window> test,
                       const std::map<std::string, PredictionSet>& predictions,
                       const EvalOptions& opts = {});

/// Stable, diffable serialization (JSON with a fixed key order).
std::string format_report(const MetricsReport& report);

}  // namespace amenet

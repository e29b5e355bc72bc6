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

#include "amenet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

namespace amenet {

namespace {

void check_lengths(std::span<const Vec2> pred, std::span<const Vec2> gt) {
  if (pred.empty() || pred.size() != gt.size()) {
    throw std::invalid_argument("prediction has " + std::to_string(pred.size()) +
                                " steps, ground truth " + std::to_string(gt.size()));
  }
}

Vec2 lerp(Vec2 a, Vec2 b, double s) { return {a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)}; }

}  // namespace

double ade(std::span<const Vec2> pred, std::span<const Vec2> gt) {
  check_lengths(pred, gt);
  double total = 0.0;
  for (std::size_t t = 0; t < pred.size(); ++t) total += distance(pred[t], gt[t]);
  return total / static_cast<double>(pred.size());
}

double fde(std::span<const Vec2> pred, std::span<const Vec2> gt) {
  check_lengths(pred, gt);
  return distance(pred.back(), gt.back());
}

BestOf best_of(const std::vector<std::vector<Vec2>>& samples, std::span<const Vec2> gt) {
  if (samples.empty()) throw std::invalid_argument("best_of: no samples");
  BestOf best;
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const double a = ade(samples[n], gt);
    const double f = fde(samples[n], gt);
    if (n == 0 || std::tie(a, f) < std::tie(best.ade, best.fde)) best = {n, a, f};
  }
  return best;
}

double min_pair_distance(std::span<const Vec2> a, std::span<const Vec2> b, int substeps) {
  if (a.size() != b.size()) throw std::invalid_argument("paths are not on the same clock");
  if (substeps < 0) throw std::invalid_argument("substeps must be >= 0");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < a.size(); ++t) {
    best = std::min(best, distance(a[t], b[t]));
    if (t + 1 == a.size()) break;
    for (int k = 1; k <= substeps; ++k) {
      const double s = static_cast<double>(k) / (substeps + 1);
      best = std::min(best, distance(lerp(a[t], a[t + 1], s), lerp(b[t], b[t + 1], s)));
    }
  }
  return best;
}

CollisionResult count_collisions(const std::vector<std::vector<Vec2>>& paths, double threshold_m,
                                 int substeps) {
  if (!(threshold_m > 0.0)) throw std::invalid_argument("collision threshold must be positive");
  CollisionResult r;
  r.invalid.assign(paths.size(), false);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      if (min_pair_distance(paths[i], paths[j], substeps) < threshold_m) {
        ++r.pairs;
        r.invalid[i] = r.invalid[j] = true;
      }
    }
  }
  r.invalid_count = static_cast<int>(std::count(r.invalid.begin(), r.invalid.end(), true));
  return r;
}

namespace {

/// Minimum distance to a neighbor that may be absent at some steps; only
/// instants where both are present count.
double min_distance_to_track(std::span<const Vec2> pred, const std::vector<std::optional<Vec2>>& other,
                             int substeps) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < pred.size(); ++t) {
    if (!other[t]) continue;
    best = std::min(best, distance(pred[t], *other[t]));
    if (t + 1 == pred.size() || !other[t + 1]) continue;
    for (int k = 1; k <= substeps; ++k) {
      const double s = static_cast<double>(k) / (substeps + 1);
      best = std::min(best, distance(lerp(pred[t], pred[t + 1], s), lerp(*other[t], *other[t + 1], s)));
    }
  }
  return best;
}

void accumulate(Aggregate& a, const WindowResult& w) {
  ++a.window_count;
  a.ade_most_likely += w.ade_most_likely;
  a.fde_most_likely += w.fde_most_likely;
  a.ade_top10 += w.ade_top;
  a.fde_top10 += w.fde_top;
}

void finish(Aggregate& a) {
  if (a.window_count == 0) return;
  const double n = static_cast<double>(a.window_count);
  a.ade_most_likely /= n;
  a.fde_most_likely /= n;
  a.ade_top10 /= n;
  a.fde_top10 /= n;
}

}  // namespace

MetricsReport evaluate(std::span<const Window> test,
                       const std::map<std::string, PredictionSet>& predictions,
                       const EvalOptions& opts) {
  MetricsReport report;
  std::vector<const Window*> used;
  std::vector<const PredictionSet*> sets;
  for (const auto& w : test) {
    auto it = predictions.find(w.id);
    if (it == predictions.end() || it->second.samples.empty()) {
      report.missing.push_back(w.id);
      continue;
    }
    const PredictionSet& ps = it->second;
    WindowResult r;
    r.id = w.id;
    r.scene = w.scene;
    r.linearity = classify_linearity(w.full_path(), opts.linearity_threshold);
    const Ranking rk = rank(ps, opts.rank);
    r.ranked = rk.scored;
    r.most_likely = rk.most_likely;
    r.ade_most_likely = ade(ps.samples[r.most_likely], w.fut);
    r.fde_most_likely = fde(ps.samples[r.most_likely], w.fut);
    const BestOf b = best_of(ps.samples, w.fut);
    r.best = b.index;
    r.ade_top = b.ade;
    r.fde_top = b.fde;
    report.windows.push_back(r);
    used.push_back(&w);
    sets.push_back(&ps);
  }

  for (const auto& r : report.windows) {
    accumulate(report.overall, r);
    accumulate(report.per_scene[r.scene], r);
    accumulate(r.linearity == Linearity::kLinear ? report.linear : report.nonlinear, r);
  }

  // Collisions. Each checked path belongs to one window; a pair is credited
  // to its scene and to a linearity class when both windows share it.
  std::vector<bool> invalid(report.windows.size(), false);
  auto credit_pair = [&](std::size_t i, std::optional<std::size_t> j) {
    ++report.overall.collision_count;
    const WindowResult& a = report.windows[i];
    ++report.per_scene[a.scene].collision_count;
    if (!j || report.windows[*j].linearity == a.linearity) {
      ++(a.linearity == Linearity::kLinear ? report.linear : report.nonlinear).collision_count;
    }
    invalid[i] = true;
    if (j) invalid[*j] = true;
  };
  auto sample_count = [&](std::size_t i) { return sets[i]->samples.size(); };
  std::size_t max_samples = 1;
  if (opts.collision_mode == CollisionMode::kPerSample) {
    for (std::size_t i = 0; i < sets.size(); ++i) max_samples = std::max(max_samples, sample_count(i));
  }
  auto path_of = [&](std::size_t i, std::size_t s) -> const std::vector<Vec2>* {
    if (opts.collision_mode == CollisionMode::kMostLikely) {
      return &sets[i]->samples[report.windows[i].most_likely];
    }
    return s < sample_count(i) ? &sets[i]->samples[s] : nullptr;
  };

  if (opts.collision_partner == CollisionPartner::kPredicted) {
    std::map<std::tuple<std::string, std::int64_t, std::size_t>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < used.size(); ++i) {
      groups[{used[i]->scene, used[i]->start_frame, used[i]->fut.size()}].push_back(i);
    }
    for (const auto& [key, members] : groups) {
      for (std::size_t s = 0; s < max_samples; ++s) {
        for (std::size_t a = 0; a < members.size(); ++a) {
          for (std::size_t b = a + 1; b < members.size(); ++b) {
            const std::size_t i = members[a], j = members[b];
            if (used[i]->target == used[j]->target) continue;
            const auto* pa = path_of(i, s);
            const auto* pb = path_of(j, s);
            if (!pa || !pb) continue;
            if (min_pair_distance(*pa, *pb, opts.substeps) < opts.collision_threshold) {
              credit_pair(i, j);
            }
          }
        }
      }
    }
  } else {
    for (std::size_t i = 0; i < used.size(); ++i) {
      const Window& w = *used[i];
      const auto fut_frames = w.fut_frames();
      std::map<AgentId, std::vector<std::optional<Vec2>>> tracks;
      for (std::size_t t = 0; t < fut_frames.size(); ++t) {
        for (const auto& nb : fut_frames[t].neighbors) {
          auto& tr = tracks[nb.agent];
          tr.resize(fut_frames.size());
          tr[t] = nb.pos;
        }
      }
      for (std::size_t s = 0; s < max_samples; ++s) {
        const auto* p = path_of(i, s);
        if (!p) continue;
        for (const auto& [agent, track] : tracks) {
          if (min_distance_to_track(*p, track, opts.substeps) < opts.collision_threshold) {
            credit_pair(i, std::nullopt);
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < invalid.size(); ++i) {
    if (!invalid[i]) continue;
    const WindowResult& r = report.windows[i];
    ++report.overall.invalid_count;
    ++report.per_scene[r.scene].invalid_count;
    ++(r.linearity == Linearity::kLinear ? report.linear : report.nonlinear).invalid_count;
  }

  finish(report.overall);
  finish(report.linear);
  finish(report.nonlinear);
  for (auto& [name, agg] : report.per_scene) finish(agg);

  report.config["collision_threshold"] = std::to_string(opts.collision_threshold);
  report.config["substeps"] = std::to_string(opts.substeps);
  report.config["collision_mode"] =
      opts.collision_mode == CollisionMode::kMostLikely ? "most_likely" : "per_sample";
  report.config["collision_on"] =
      opts.collision_partner == CollisionPartner::kPredicted ? "predicted" : "ground_truth";
  report.config["rank_mode"] = opts.rank.mode == ScoreMode::kDensitySum ? "density" : "log_density";
  report.config["linearity_threshold"] = std::to_string(opts.linearity_threshold);
  return report;
}

namespace {

nlohmann::ordered_json aggregate_json(const Aggregate& a) {
  nlohmann::ordered_json j;
  j["window_count"] = a.window_count;
  j["ade_most_likely"] = a.ade_most_likely;
  j["fde_most_likely"] = a.fde_most_likely;
  j["ade_top10"] = a.ade_top10;
  j["fde_top10"] = a.fde_top10;
  j["collision_count"] = a.collision_count;
  j["invalid_count"] = a.invalid_count;
  return j;
}

}  // namespace

std::string format_report(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["overall"] = aggregate_json(report.overall);
  j["linear"] = aggregate_json(report.linear);
  j["nonlinear"] = aggregate_json(report.nonlinear);
  nlohmann::ordered_json scenes = nlohmann::ordered_json::object();
  for (const auto& [name, agg] : report.per_scene) scenes[name] = aggregate_json(agg);
  j["per_scene"] = scenes;
  j["missing"] = report.missing;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.config) cfg[k] = v;
  j["config"] = cfg;
  nlohmann::ordered_json windows = nlohmann::ordered_json::array();
  for (const auto& w : report.windows) {
    nlohmann::ordered_json e;
    e["id"] = w.id;
    e["scene"] = w.scene;
    e["linear"] = w.linearity == Linearity::kLinear;
    e["most_likely"] = w.most_likely;
    e["ranked"] = w.ranked;
    e["best"] = w.best;
    e["ade_most_likely"] = w.ade_most_likely;
    e["fde_most_likely"] = w.fde_most_likely;
    e["ade_top10"] = w.ade_top;
    e["fde_top10"] = w.fde_top;
    windows.push_back(std::move(e));
  }
  j["windows"] = windows;
  return j.dump(2) + "\n";
}

}  // namespace amenet

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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace amenet {

/// Seconds between two consecutive samples at the benchmark rate (2.5 Hz).
inline constexpr double kStepSeconds = 0.4;
inline constexpr double kDefaultFrameRateHz = 2.5;

using AgentId = std::int64_t;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;

  double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct TrackPoint {
  std::int64_t frame = 0;
  AgentId agent = 0;
  Vec2 pos;
};

/// One agent's contiguous run of samples. Frames increase by exactly one.
struct Trajectory {
  AgentId agent = 0;
  std::vector<TrackPoint> points;

  std::int64_t first_frame() const { return points.front().frame; }
  std::int64_t last_frame() const { return points.back().frame; }
  std::vector<Vec2> positions() const;
};

struct Scene {
  std::string name;
  std::vector<Trajectory> trajectories;
  double frame_rate_hz = kDefaultFrameRateHz;
};

struct OffsetSeq {
  Vec2 origin;
  std::vector<Vec2> deltas;
};

/// Throws std::invalid_argument if the trajectory breaks its invariants.
void validate(const Trajectory& traj);

OffsetSeq to_offsets(const std::vector<Vec2>& positions);
OffsetSeq to_offsets(const Trajectory& traj);
std::vector<Vec2> from_offsets(const OffsetSeq& offsets);

/// Heading of a displacement in degrees, shifted into [0, 360). A zero
/// displacement maps to 0.
double heading_deg(Vec2 delta);

Vec2 rotate(Vec2 p, double angle_rad);

/// Rotates every point of the scene about the global origin.
Scene rotate_scene(const Scene& scene, double angle_rad);

}  // namespace amenet

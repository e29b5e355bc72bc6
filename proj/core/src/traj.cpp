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

#include "amenet/traj.hpp"

#include <numbers>
#include <stdexcept>

namespace amenet {

std::vector<Vec2> Trajectory::positions() const {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.pos);
  return out;
}

void validate(const Trajectory& traj) {
  if (traj.points.empty()) throw std::invalid_argument("trajectory has no points");
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    const auto& p = traj.points[k];
    if (p.frame < 0) throw std::invalid_argument("negative frame index");
    if (!std::isfinite(p.pos.x) || !std::isfinite(p.pos.y)) {
      throw std::invalid_argument("non-finite coordinate");
    }
    if (p.agent != traj.agent) throw std::invalid_argument("point agent differs from trajectory agent");
    if (k > 0 && p.frame != traj.points[k - 1].frame + 1) {
      throw std::invalid_argument("trajectory frames are not consecutive");
    }
  }
}

OffsetSeq to_offsets(const std::vector<Vec2>& positions) {
  if (positions.empty()) throw std::invalid_argument("to_offsets: empty position list");
  OffsetSeq out;
  out.origin = positions.front();
  out.deltas.reserve(positions.size() - 1);
  for (std::size_t k = 0; k + 1 < positions.size(); ++k) {
    out.deltas.push_back(positions[k + 1] - positions[k]);
  }
  return out;
}

OffsetSeq to_offsets(const Trajectory& traj) { return to_offsets(traj.positions()); }

std::vector<Vec2> from_offsets(const OffsetSeq& offsets) {
  std::vector<Vec2> out;
  out.reserve(offsets.deltas.size() + 1);
  out.push_back(offsets.origin);
  for (const auto& d : offsets.deltas) out.push_back(out.back() + d);
  return out;
}

double heading_deg(Vec2 delta) {
  if (delta.x == 0.0 && delta.y == 0.0) return 0.0;
  double deg = std::atan2(delta.y, delta.x) * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 360.0;
  // atan2 of a tiny negative y can round to exactly -0 + 360.
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

Vec2 rotate(Vec2 p, double angle_rad) {
  const double c = std::cos(angle_rad);
  const double s = std::sin(angle_rad);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

Scene rotate_scene(const Scene& scene, double angle_rad) {
  Scene out = scene;
  if (angle_rad == 0.0) return out;
  for (auto& traj : out.trajectories) {
    for (auto& p : traj.points) p.pos = rotate(p.pos, angle_rad);
  }
  return out;
}

}  // namespace amenet

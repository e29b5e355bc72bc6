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

#include "amenet/maps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace amenet::maps {

int MapConfig::grid_size() const {
  if (!(extent_m > 0.0) || !(cell_m > 0.0)) {
    throw std::invalid_argument("map extent and cell size must be positive");
  }
  const double ratio = extent_m / cell_m;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 || rounded < 1.0) {
    throw std::invalid_argument("map extent must be an integer multiple of the cell size");
  }
  return static_cast<int>(rounded);
}

namespace {

std::optional<CellIndex> to_cell(double rel_x, double rel_y, const MapConfig& cfg) {
  const int n = cfg.grid_size();
  const double center = n / 2.0;
  const double cw = std::floor(center + rel_x / cfg.cell_m);
  const double ch = std::floor(center + rel_y / cfg.cell_m);
  if (!(cw >= 0.0 && cw < n && ch >= 0.0 && ch < n)) return std::nullopt;
  return CellIndex{static_cast<int>(cw), static_cast<int>(ch)};
}

}  // namespace

std::optional<CellIndex> map_cell(Vec2 target_pos, Vec2 target_delta, Vec2 nbr_pos, Vec2 nbr_delta,
                                  const MapConfig& cfg) {
  const double rx = (nbr_pos.x - target_pos.x) + (nbr_delta.x - target_delta.x);
  const double ry = (nbr_pos.y - target_pos.y) + (nbr_delta.y - target_delta.y);
  return to_cell(rx, ry, cfg);
}

std::optional<CellIndex> position_cell(Vec2 target_pos, Vec2 nbr_pos, const MapConfig& cfg) {
  return to_cell(nbr_pos.x - target_pos.x, nbr_pos.y - target_pos.y, cfg);
}

DynamicMap build_dynamic_map(const FrameState& state, AgentId target, const MapConfig& cfg) {
  const int n = cfg.grid_size();
  DynamicMap out{state.frame, target, GridTensor(3, n, n)};

  const auto cells = static_cast<std::size_t>(n * n);
  std::vector<int> count(cells, 0);
  std::vector<double> hx(cells, 0.0), hy(cells, 0.0), speed_sum(cells, 0.0);
  std::vector<Vec2> first_delta(cells);

  for (const auto& nb : state.neighbors) {
    if (nb.agent == target) continue;
    auto cell = map_cell(state.target_pos, state.target_offset, nb.pos, nb.offset, cfg);
    if (!cell) continue;
    const auto idx = static_cast<std::size_t>(cell->h * n + cell->w);
    const double len = nb.offset.norm();
    // Stationary agents point along +x, matching heading_deg((0,0)) == 0.
    const Vec2 u = len > 0.0 ? Vec2{nb.offset.x / len, nb.offset.y / len} : Vec2{1.0, 0.0};
    if (count[idx] == 0) first_delta[idx] = nb.offset;
    ++count[idx];
    hx[idx] += u.x;
    hy[idx] += u.y;
    speed_sum[idx] += len / cfg.step_seconds;
  }

  GridTensor& g = out.grid;
  double s_min = 0.0, s_max = 0.0, c_max = 0.0;
  bool first = true;
  for (int h = 0; h < n; ++h) {
    for (int w = 0; w < n; ++w) {
      const auto idx = static_cast<std::size_t>(h * n + w);
      double s = 0.0;
      if (count[idx] > 0) {
        const Vec2 mean_dir = count[idx] == 1 ? first_delta[idx] : Vec2{hx[idx], hy[idx]};
        g.at(kOrientation, w, h) = heading_deg(mean_dir) / 360.0;
        s = speed_sum[idx] / count[idx];
        g.at(kSpeed, w, h) = s;
        g.at(kPosition, w, h) = cfg.position_layer == PositionLayer::kBinary ? 1.0 : count[idx];
        c_max = std::max<double>(c_max, count[idx]);
      }
      if (first) {
        s_min = s_max = s;
        first = false;
      } else {
        s_min = std::min(s_min, s);
        s_max = std::max(s_max, s);
      }
    }
  }

  // Min-Max over the whole layer; a flat layer maps occupied cells to 1
  // unless every value is zero.
  for (int h = 0; h < n; ++h) {
    for (int w = 0; w < n; ++w) {
      const auto idx = static_cast<std::size_t>(h * n + w);
      if (count[idx] == 0) continue;
      double& s = g.at(kSpeed, w, h);
      if (s_max > s_min) {
        s = (s - s_min) / (s_max - s_min);
      } else {
        s = s_max > 0.0 ? 1.0 : 0.0;
      }
      if (cfg.position_layer == PositionLayer::kDensity) g.at(kPosition, w, h) /= c_max;
    }
  }
  return out;
}

OccupancyGrid build_occupancy_grid(const FrameState& state, AgentId target, const MapConfig& cfg) {
  const int n = cfg.grid_size();
  OccupancyGrid out{state.frame, target, GridTensor(1, n, n)};
  for (const auto& nb : state.neighbors) {
    if (nb.agent == target) continue;
    if (auto cell = position_cell(state.target_pos, nb.pos, cfg)) out.grid.at(0, cell->w, cell->h) = 1.0;
  }
  return out;
}

std::vector<DynamicMap> map_sequence(std::span<const FrameState> frames, AgentId target,
                                     const MapConfig& cfg) {
  std::vector<DynamicMap> out;
  out.reserve(frames.size());
  for (const auto& fs : frames) out.push_back(build_dynamic_map(fs, target, cfg));
  return out;
}

std::vector<DynamicMap> map_sequence(const Window& window, Span span, const MapConfig& cfg) {
  return map_sequence(span == Span::kObserved ? window.obs_frames() : window.fut_frames(),
                      window.target, cfg);
}

std::vector<OccupancyGrid> occupancy_sequence(std::span<const FrameState> frames, AgentId target,
                                              const MapConfig& cfg) {
  std::vector<OccupancyGrid> out;
  out.reserve(frames.size());
  for (const auto& fs : frames) out.push_back(build_occupancy_grid(fs, target, cfg));
  return out;
}

std::string format_map_dump(const DynamicMap& map, const MapConfig& cfg) {
  const GridTensor& g = map.grid;
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "frame %lld\n", static_cast<long long>(map.frame));
  out += buf;
  std::snprintf(buf, sizeof(buf), "target %lld\n", static_cast<long long>(map.target));
  out += buf;
  std::snprintf(buf, sizeof(buf), "W %d\nH %d\n", g.width, g.height);
  out += buf;
  std::snprintf(buf, sizeof(buf), "cell_m %.6f\n", cfg.cell_m);
  out += buf;
  static constexpr const char* kNames[] = {"orientation", "speed", "position"};
  for (int c = 0; c < g.channels; ++c) {
    out += "layer ";
    out += c < 3 ? kNames[c] : "extra";
    out += '\n';
    for (int h = 0; h < g.height; ++h) {
      for (int w = 0; w < g.width; ++w) {
        std::snprintf(buf, sizeof(buf), w == 0 ? "%.6f" : " %.6f", g.at(c, w, h));
        out += buf;
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace amenet::maps

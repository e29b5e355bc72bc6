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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amenet/data_io.hpp"
#include "amenet/grid.hpp"
#include "amenet/traj.hpp"

namespace amenet::maps {

enum class PositionLayer {
  kBinary,   // 1 where any neighbor is mapped
  kDensity,  // neighbor count per cell, Min-Max normalized
};

struct MapConfig {
  double extent_m = 32.0;
  double cell_m = 1.0;
  double step_seconds = kStepSeconds;
  PositionLayer position_layer = PositionLayer::kBinary;

  /// Cells per side; throws std::invalid_argument if extent/cell is not an
  /// integer or either is non-positive.
  int grid_size() const;
};

using amenet::GridTensor;

enum Layer : int { kOrientation = 0, kSpeed = 1, kPosition = 2 };

struct DynamicMap {
  std::int64_t frame = 0;
  AgentId target = 0;
  GridTensor grid;  // 3 channels: orientation, speed, position
};

struct OccupancyGrid {
  std::int64_t frame = 0;
  AgentId target = 0;
  GridTensor grid;  // 1 channel
};

struct CellIndex {
  int w = 0;
  int h = 0;
  friend bool operator==(CellIndex, CellIndex) = default;
};

/// Cell reached by a neighbor's relative position plus its relative offset.
/// Empty when the cell falls outside the grid.
std::optional<CellIndex> map_cell(Vec2 target_pos, Vec2 target_delta, Vec2 nbr_pos, Vec2 nbr_delta,
                                  const MapConfig& cfg);

/// Cell of the neighbor's relative position only (occupancy-grid rule).
std::optional<CellIndex> position_cell(Vec2 target_pos, Vec2 nbr_pos, const MapConfig& cfg);

DynamicMap build_dynamic_map(const FrameState& state, AgentId target, const MapConfig& cfg);
OccupancyGrid build_occupancy_grid(const FrameState& state, AgentId target, const MapConfig& cfg);

enum class Span { kObserved, kFuture };

std::vector<DynamicMap> map_sequence(const Window& window, Span span, const MapConfig& cfg);
std::vector<DynamicMap> map_sequence(std::span<const FrameState> frames, AgentId target,
                                     const MapConfig& cfg);
std::vector<OccupancyGrid> occupancy_sequence(std::span<const FrameState> frames, AgentId target,
                                              const MapConfig& cfg);

/// Text dump for diffing: a header (frame, target, W, H, cell_m) followed by
/// one H-row block per layer. Row h lists cells w = 0..W-1; h grows with +y.
std::string format_map_dump(const DynamicMap& map, const MapConfig& cfg);

}  // namespace amenet::maps

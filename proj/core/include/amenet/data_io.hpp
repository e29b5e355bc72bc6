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
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "amenet/traj.hpp"

namespace amenet {

/// Raised for malformed dataset or config text. Carries the 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// An agent co-present with the target at one frame. `offset` is the
/// displacement from the agent's previous sample, or zero when it has none.
struct Neighbor {
  AgentId agent = 0;
  Vec2 pos;
  Vec2 offset;
};

struct FrameState {
  std::int64_t frame = 0;
  Vec2 target_pos;
  Vec2 target_offset;
  std::vector<Neighbor> neighbors;  // never contains the target
};

/// The part of a window that is available at prediction time.
struct ObservedWindow {
  std::string id;
  std::string scene;
  AgentId target = 0;
  std::int64_t start_frame = 0;
  std::vector<Vec2> obs;
  std::vector<FrameState> frames;
};

/// One prediction instance: T observed and T' future positions of the target
/// plus, for each of the T + T' frames, the co-present neighbors.
struct Window {
  std::string id;
  std::string scene;
  AgentId target = 0;
  std::int64_t start_frame = 0;
  std::vector<Vec2> obs;
  std::vector<Vec2> fut;
  std::vector<FrameState> frames;

  std::size_t obs_len() const { return obs.size(); }
  std::size_t pred_len() const { return fut.size(); }
  std::span<const FrameState> obs_frames() const { return {frames.data(), obs.size()}; }
  std::span<const FrameState> fut_frames() const {
    return {frames.data() + obs.size(), fut.size()};
  }
  /// Observed positions followed by future positions.
  std::vector<Vec2> full_path() const;
  /// Offsets from the last observed position through the future (length T').
  std::vector<Vec2> future_offsets() const;
  ObservedWindow observed() const;
};

Scene load_table(const std::filesystem::path& path);
Scene parse_table(std::string_view text, const std::string& scene_name = "scene");
void save_table(const Scene& scene, const std::filesystem::path& path);
std::string format_table(const Scene& scene);

/// Groups rows into per-agent trajectories, splitting wherever an agent's
/// frames are not consecutive.
Scene build_scene(std::vector<TrackPoint> rows, const std::string& name, double frame_rate_hz);

Scene downsample(const Scene& scene, int factor);

struct WindowOptions {
  int obs_len = 8;
  int pred_len = 12;
  int stride = 1;
};

/// Windows ordered by target agent id, then start frame.
std::vector<Window> make_windows(const Scene& scene, const WindowOptions& opts);

enum class SplitMode { kWindow, kScene };

struct Split {
  std::vector<Window> train;
  std::vector<Window> test;
};

Split split_windows(std::span<const Window> windows, double test_fraction, std::uint64_t seed,
                    SplitMode mode = SplitMode::kWindow);

enum class Linearity { kLinear, kNonlinear };

inline constexpr double kDefaultLinearityThreshold = 0.1;

/// Total squared residual of independent degree-2 polynomial fits of x(k)
/// and y(k) over the step index k.
double quadratic_fit_residual(std::span<const Vec2> positions);

Linearity classify_linearity(std::span<const Vec2> positions,
                             double threshold = kDefaultLinearityThreshold);

/// Rotates every coordinate in the window about the global origin.
Window rotate_window(const Window& window, double angle_rad);

}  // namespace amenet

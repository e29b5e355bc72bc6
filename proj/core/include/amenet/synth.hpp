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
#include <string>
#include <vector>

#include "amenet/traj.hpp"

namespace amenet {

enum class SynthKind { kStraight, kCrossing, kFork, kArc, kStill };

SynthKind parse_synth_kind(const std::string& name);
std::string to_string(SynthKind kind);

/// Parameters of a synthetic scene. Only kind, agent_count, noise_std and
/// seed are required in a spec file; the rest shape the individual families.
struct SynthSpec {
  SynthKind kind = SynthKind::kStraight;
  int agent_count = 1;
  double noise_std = 0.0;
  std::uint64_t seed = 0;

  int frames = 20;          // samples per agent (or per episode)
  int obs_len = 8;          // fork: branching happens after this many samples
  double speed_mps = 1.0;
  double branch_prob = 0.5;        // fork: fraction of episodes taking the left branch
  double branch_angle_deg = 45.0;  // fork: heading change at the branch point
  int crossing_jitter = 0;  // crossing: max |arrival offset| of the second agent, in steps
  bool randomize = false;   // random headings / placement instead of the canonical layout
};

/// Fork episode: the observed prefix is shared, the future follows one branch.
struct ForkEpisode {
  AgentId agent = 0;
  bool took_left = false;
  std::int64_t first_frame = 0;
  std::vector<Vec2> left_future;
  std::vector<Vec2> right_future;
};

/// Two agents whose straight paths intersect. Agent `a` reaches the
/// intersection at `crossing_frame`, agent `b` `arrival_offset` steps later.
struct CrossingPair {
  AgentId a = 0;
  AgentId b = 0;
  std::int64_t crossing_frame = 0;
  int arrival_offset = 0;
  Vec2 intersection;
  double closest_time = 0.0;      // in frames, c + offset / 2
  double closest_distance = 0.0;  // noise-free
};

struct SynthResult {
  Scene scene;
  std::vector<ForkEpisode> forks;
  std::vector<CrossingPair> crossings;
};

/// Deterministic in the spec: equal specs produce bit-identical scenes.
SynthResult synth_scene(const SynthSpec& spec);

/// Flat `key=value` text; `#` starts a comment line.
SynthSpec parse_synth_spec(std::string_view text);
SynthSpec load_synth_spec(const std::filesystem::path& path);
std::string format_synth_spec(const SynthSpec& spec);

}  // namespace amenet

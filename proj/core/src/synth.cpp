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

#include "amenet/synth.hpp"

#include <algorithm>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "amenet/config.hpp"
#include "amenet/data_io.hpp"

namespace amenet {

namespace {

constexpr int kEpisodeGap = 5;

struct Builder {
  explicit Builder(const SynthSpec& s) : spec(s), rng(s.seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  void add(AgentId agent, std::int64_t first_frame, const std::vector<Vec2>& path) {
    for (std::size_t k = 0; k < path.size(); ++k) {
      rows.push_back({first_frame + static_cast<std::int64_t>(k), agent, path[k]});
    }
  }

  const SynthSpec& spec;
  std::mt19937_64 rng;
  std::vector<TrackPoint> rows;
};

Vec2 unit(double angle_rad) { return {std::cos(angle_rad), std::sin(angle_rad)}; }

std::vector<Vec2> straight_path(Vec2 start, double heading, double step, int n) {
  std::vector<Vec2> path;
  const Vec2 u = unit(heading);
  for (int k = 0; k < n; ++k) path.push_back(start + (step * k) * u);
  return path;
}

}  // namespace

SynthKind parse_synth_kind(const std::string& name) {
  if (name == "straight") return SynthKind::kStraight;
  if (name == "crossing") return SynthKind::kCrossing;
  if (name == "fork") return SynthKind::kFork;
  if (name == "arc") return SynthKind::kArc;
  if (name == "still") return SynthKind::kStill;
  throw std::invalid_argument("unknown synthetic scene kind: " + name);
}

std::string to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::kStraight: return "straight";
    case SynthKind::kCrossing: return "crossing";
    case SynthKind::kFork: return "fork";
    case SynthKind::kArc: return "arc";
    case SynthKind::kStill: return "still";
  }
  return "unknown";
}

SynthResult synth_scene(const SynthSpec& spec) {
  if (spec.agent_count < 1) throw std::invalid_argument("synth: agent_count must be >= 1");
  if (!(spec.noise_std >= 0.0)) throw std::invalid_argument("synth: noise_std must be >= 0");
  if (spec.frames < 2) throw std::invalid_argument("synth: frames must be >= 2");
  if (spec.kind == SynthKind::kFork && (spec.obs_len < 2 || spec.obs_len >= spec.frames)) {
    throw std::invalid_argument("synth: fork needs 2 <= obs_len < frames");
  }
  if (!(spec.branch_prob >= 0.0 && spec.branch_prob <= 1.0)) {
    throw std::invalid_argument("synth: branch_prob must lie in [0, 1]");
  }

  Builder b(spec);
  SynthResult result;
  const double step = spec.speed_mps * kStepSeconds;
  const int block = spec.frames + kEpisodeGap;

  switch (spec.kind) {
    case SynthKind::kStraight:
    case SynthKind::kStill: {
      const double s = spec.kind == SynthKind::kStill ? 0.0 : step;
      for (int a = 0; a < spec.agent_count; ++a) {
        Vec2 start{0.0, 3.0 * a};
        double heading = 0.0;
        if (spec.randomize) {
          start = {b.uniform(-10.0, 10.0), b.uniform(-10.0, 10.0)};
          heading = b.uniform(0.0, 2.0 * std::numbers::pi);
        }
        b.add(a + 1, 0, straight_path(start, heading, s, spec.frames));
      }
      break;
    }
    case SynthKind::kArc: {
      const double radius = 5.0;
      const double dtheta = step / radius;
      for (int a = 0; a < spec.agent_count; ++a) {
        Vec2 center{0.0, 12.0 * a};
        double phase = -std::numbers::pi / 2.0;
        double dir = 1.0;
        if (spec.randomize) {
          center = {b.uniform(-10.0, 10.0), b.uniform(-10.0, 10.0)};
          phase = b.uniform(0.0, 2.0 * std::numbers::pi);
          dir = b.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
        }
        std::vector<Vec2> path;
        for (int k = 0; k < spec.frames; ++k) {
          path.push_back(center + radius * unit(phase + dir * dtheta * k));
        }
        b.add(a + 1, 0, path);
      }
      break;
    }
    case SynthKind::kCrossing: {
      const int pairs = spec.agent_count / 2;
      for (int p = 0; p < pairs; ++p) {
        const std::int64_t f0 = static_cast<std::int64_t>(p) * block;
        int c = spec.frames / 2;
        double heading_a = 0.0;
        double heading_b = std::numbers::pi / 2.0;
        Vec2 meet{0.0, 0.0};
        if (spec.randomize) {
          c = std::uniform_int_distribution<int>(2, std::max(2, spec.frames - 3))(b.rng);
          heading_a = b.uniform(0.0, 2.0 * std::numbers::pi);
          const double sweep = b.uniform(std::numbers::pi / 3.0, 2.0 * std::numbers::pi / 3.0);
          heading_b = heading_a + (b.uniform(0.0, 1.0) < 0.5 ? -sweep : sweep);
          meet = {b.uniform(-10.0, 10.0), b.uniform(-10.0, 10.0)};
        }
        int delta = 0;
        if (spec.crossing_jitter > 0) {
          delta = std::uniform_int_distribution<int>(-spec.crossing_jitter, spec.crossing_jitter)(b.rng);
        }
        const Vec2 ua = unit(heading_a);
        const Vec2 ub = unit(heading_b);
        std::vector<Vec2> pa, pb;
        for (int k = 0; k < spec.frames; ++k) {
          pa.push_back(meet + (step * (k - c)) * ua);
          pb.push_back(meet + (step * (k - c - delta)) * ub);
        }
        CrossingPair cp;
        cp.a = 2 * p + 1;
        cp.b = 2 * p + 2;
        cp.crossing_frame = f0 + c;
        cp.arrival_offset = delta;
        cp.intersection = meet;
        cp.closest_time = static_cast<double>(f0 + c) + delta / 2.0;
        cp.closest_distance = step * std::abs(delta) / 2.0 * (ua + ub).norm();
        b.add(cp.a, f0, pa);
        b.add(cp.b, f0, pb);
        result.crossings.push_back(cp);
      }
      if (spec.agent_count % 2 == 1) {
        b.add(spec.agent_count, static_cast<std::int64_t>(pairs) * block,
              straight_path({0.0, 0.0}, 0.0, step, spec.frames));
      }
      break;
    }
    case SynthKind::kFork: {
      const int n = spec.agent_count;
      const auto n_left = static_cast<int>(std::llround(spec.branch_prob * n));
      std::vector<int> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), 0);
      if (n_left != 0 && n_left != n) {
        // Alternate for an even split so pairs stay adjacent, shuffle otherwise.
        if (2 * n_left == n) {
          std::vector<int> alt;
          for (int e = 0; e < n; e += 2) alt.push_back(e);
          for (int e = 1; e < n; e += 2) alt.push_back(e);
          order = alt;
        } else {
          std::shuffle(order.begin(), order.end(), b.rng);
        }
      }
      std::vector<bool> left(static_cast<std::size_t>(n), false);
      for (int k = 0; k < n_left; ++k) left[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;

      const double turn = spec.branch_angle_deg * std::numbers::pi / 180.0;
      const std::vector<Vec2> prefix = straight_path({0.0, 0.0}, 0.0, step, spec.obs_len);
      const int n_fut = spec.frames - spec.obs_len;
      auto branch = [&](double heading) {
        std::vector<Vec2> fut;
        for (int k = 1; k <= n_fut; ++k) fut.push_back(prefix.back() + (step * k) * unit(heading));
        return fut;
      };
      const std::vector<Vec2> left_fut = branch(turn);
      const std::vector<Vec2> right_fut = branch(-turn);
      for (int e = 0; e < n; ++e) {
        ForkEpisode ep;
        ep.agent = e + 1;
        ep.took_left = left[static_cast<std::size_t>(e)];
        ep.first_frame = static_cast<std::int64_t>(e) * block;
        ep.left_future = left_fut;
        ep.right_future = right_fut;
        std::vector<Vec2> path = prefix;
        const auto& fut = ep.took_left ? left_fut : right_fut;
        path.insert(path.end(), fut.begin(), fut.end());
        b.add(ep.agent, ep.first_frame, path);
        result.forks.push_back(std::move(ep));
      }
      break;
    }
  }

  if (spec.noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise_std);
    for (auto& r : b.rows) {
      r.pos.x += noise(b.rng);
      r.pos.y += noise(b.rng);
    }
  }
  result.scene = build_scene(std::move(b.rows), "synth_" + to_string(spec.kind), kDefaultFrameRateHz);
  return result;
}

SynthSpec parse_synth_spec(std::string_view text) {
  SynthSpec spec;
  bool has_kind = false;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "kind") {
      spec.kind = parse_synth_kind(value);
      has_kind = true;
    } else if (key == "agents" || key == "agent_count") {
      spec.agent_count = parse_int(key, value);
    } else if (key == "noise_std") {
      spec.noise_std = parse_number(key, value);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "frames") {
      spec.frames = parse_int(key, value);
    } else if (key == "obs_len") {
      spec.obs_len = parse_int(key, value);
    } else if (key == "speed") {
      spec.speed_mps = parse_number(key, value);
    } else if (key == "branch_prob") {
      spec.branch_prob = parse_number(key, value);
    } else if (key == "branch_angle_deg") {
      spec.branch_angle_deg = parse_number(key, value);
    } else if (key == "crossing_jitter") {
      spec.crossing_jitter = parse_int(key, value);
    } else if (key == "randomize") {
      spec.randomize = parse_bool(key, value);
    } else {
      throw std::invalid_argument("unknown synthetic spec key: " + key);
    }
  }
  if (!has_kind) throw std::invalid_argument("synthetic spec is missing 'kind'");
  return spec;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open synthetic spec: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_synth_spec(buf.str());
}

std::string format_synth_spec(const SynthSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << "kind=" << to_string(spec.kind) << '\n'
      << "agents=" << spec.agent_count << '\n'
      << "noise_std=" << spec.noise_std << '\n'
      << "seed=" << spec.seed << '\n'
      << "frames=" << spec.frames << '\n'
      << "obs_len=" << spec.obs_len << '\n'
      << "speed=" << spec.speed_mps << '\n'
      << "branch_prob=" << spec.branch_prob << '\n'
      << "branch_angle_deg=" << spec.branch_angle_deg << '\n'
      << "crossing_jitter=" << spec.crossing_jitter << '\n'
      << "randomize=" << (spec.randomize ? 1 : 0) << '\n';
  return out.str();
}

}  // namespace amenet

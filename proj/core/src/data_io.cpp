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

#include "amenet/data_io.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace amenet {

namespace {

bool parse_double(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::int64_t parse_integral(std::string_view tok, std::size_t line, const char* what) {
  double v = 0.0;
  if (!parse_double(tok, v) || !std::isfinite(v) || v != std::floor(v)) {
    throw ParseError(std::string("expected integer ") + what + ", got '" + std::string(tok) + "'",
                     line);
  }
  return static_cast<std::int64_t>(v);
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<Vec2> Window::full_path() const {
  std::vector<Vec2> out = obs;
  out.insert(out.end(), fut.begin(), fut.end());
  return out;
}

std::vector<Vec2> Window::future_offsets() const {
  std::vector<Vec2> out;
  out.reserve(fut.size());
  Vec2 prev = obs.back();
  for (const auto& p : fut) {
    out.push_back(p - prev);
    prev = p;
  }
  return out;
}

ObservedWindow Window::observed() const {
  ObservedWindow w;
  w.id = id;
  w.scene = scene;
  w.target = target;
  w.start_frame = start_frame;
  w.obs = obs;
  w.frames.assign(frames.begin(), frames.begin() + static_cast<std::ptrdiff_t>(obs.size()));
  return w;
}

Scene build_scene(std::vector<TrackPoint> rows, const std::string& name, double frame_rate_hz) {
  std::stable_sort(rows.begin(), rows.end(), [](const TrackPoint& a, const TrackPoint& b) {
    return a.agent != b.agent ? a.agent < b.agent : a.frame < b.frame;
  });
  Scene scene;
  scene.name = name;
  scene.frame_rate_hz = frame_rate_hz;
  for (const auto& row : rows) {
    bool extend = !scene.trajectories.empty() && scene.trajectories.back().agent == row.agent &&
                  scene.trajectories.back().last_frame() + 1 == row.frame;
    if (!scene.trajectories.empty() && scene.trajectories.back().agent == row.agent &&
        scene.trajectories.back().last_frame() == row.frame) {
      throw std::invalid_argument("agent " + std::to_string(row.agent) +
                                  " has two rows for frame " + std::to_string(row.frame));
    }
    if (!extend) scene.trajectories.push_back(Trajectory{row.agent, {}});
    scene.trajectories.back().points.push_back(row);
  }
  return scene;
}

Scene parse_table(std::string_view text, const std::string& scene_name) {
  std::vector<TrackPoint> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::map<std::pair<AgentId, std::int64_t>, std::size_t> seen;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() != 4) {
      throw ParseError("expected 4 fields (frame agent x y), got " + std::to_string(tokens.size()),
                       line_no);
    }
    TrackPoint p;
    p.frame = parse_integral(tokens[0], line_no, "frame");
    p.agent = parse_integral(tokens[1], line_no, "agent id");
    if (p.frame < 0) throw ParseError("negative frame", line_no);
    if (!parse_double(tokens[2], p.pos.x) || !parse_double(tokens[3], p.pos.y)) {
      throw ParseError("malformed coordinate", line_no);
    }
    if (!std::isfinite(p.pos.x) || !std::isfinite(p.pos.y)) {
      throw ParseError("non-finite coordinate", line_no);
    }
    if (!seen.emplace(std::pair{p.agent, p.frame}, line_no).second) {
      throw ParseError("duplicate row for agent " + std::to_string(p.agent), line_no);
    }
    rows.push_back(p);
  }
  return build_scene(std::move(rows), scene_name, kDefaultFrameRateHz);
}

Scene load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_table(buf.str(), path.stem().string());
}

std::string format_table(const Scene& scene) {
  std::vector<TrackPoint> rows;
  for (const auto& t : scene.trajectories) rows.insert(rows.end(), t.points.begin(), t.points.end());
  std::sort(rows.begin(), rows.end(), [](const TrackPoint& a, const TrackPoint& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.agent < b.agent;
  });
  std::string out;
  out.reserve(rows.size() * 32);
  for (const auto& r : rows) {
    out += std::to_string(r.frame);
    out += ' ';
    out += std::to_string(r.agent);
    out += ' ';
    out += shortest(r.pos.x);
    out += ' ';
    out += shortest(r.pos.y);
    out += '\n';
  }
  return out;
}

void save_table(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path.string());
  out << format_table(scene);
}

Scene downsample(const Scene& scene, int factor) {
  if (factor < 1) throw std::invalid_argument("downsample factor must be >= 1");
  if (factor == 1) return scene;
  std::vector<TrackPoint> rows;
  for (const auto& t : scene.trajectories) {
    for (const auto& p : t.points) {
      if (p.frame % factor == 0) rows.push_back({p.frame / factor, p.agent, p.pos});
    }
  }
  return build_scene(std::move(rows), scene.name, scene.frame_rate_hz / factor);
}

std::vector<Window> make_windows(const Scene& scene, const WindowOptions& opts) {
  if (opts.obs_len < 2) throw std::invalid_argument("make_windows: obs_len must be >= 2");
  if (opts.pred_len < 1) throw std::invalid_argument("make_windows: pred_len must be >= 1");
  if (opts.stride < 1) throw std::invalid_argument("make_windows: stride must be >= 1");
  const std::int64_t span = opts.obs_len + opts.pred_len;

  // frame -> co-present agents with their backward offsets
  std::map<std::int64_t, std::vector<Neighbor>> by_frame;
  for (const auto& t : scene.trajectories) {
    for (std::size_t k = 0; k < t.points.size(); ++k) {
      Vec2 off = k == 0 ? Vec2{} : t.points[k].pos - t.points[k - 1].pos;
      by_frame[t.points[k].frame].push_back({t.agent, t.points[k].pos, off});
    }
  }

  std::vector<const Trajectory*> order;
  for (const auto& t : scene.trajectories) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](const Trajectory* a, const Trajectory* b) {
    return a->agent != b->agent ? a->agent < b->agent : a->first_frame() < b->first_frame();
  });

  std::vector<Window> out;
  for (const Trajectory* t : order) {
    const auto n = static_cast<std::int64_t>(t->points.size());
    for (std::int64_t s = 0; s + span <= n; s += opts.stride) {
      Window w;
      w.scene = scene.name;
      w.target = t->agent;
      w.start_frame = t->points[static_cast<std::size_t>(s)].frame;
      w.id = scene.name + "/" + std::to_string(w.target) + "/" + std::to_string(w.start_frame);
      for (std::int64_t k = 0; k < span; ++k) {
        const std::size_t idx = static_cast<std::size_t>(s + k);
        const TrackPoint& p = t->points[idx];
        (k < opts.obs_len ? w.obs : w.fut).push_back(p.pos);
        FrameState fs;
        fs.frame = p.frame;
        fs.target_pos = p.pos;
        fs.target_offset = idx == 0 ? Vec2{} : p.pos - t->points[idx - 1].pos;
        for (const auto& nb : by_frame[p.frame]) {
          if (nb.agent != t->agent) fs.neighbors.push_back(nb);
        }
        w.frames.push_back(std::move(fs));
      }
      out.push_back(std::move(w));
    }
  }
  return out;
}

Split split_windows(std::span<const Window> windows, double test_fraction, std::uint64_t seed,
                    SplitMode mode) {
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) {
    throw std::invalid_argument("test_fraction must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::vector<bool> is_test(windows.size(), false);
  if (mode == SplitMode::kWindow) {
    std::vector<std::size_t> idx(windows.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * windows.size()));
    for (std::size_t k = 0; k < n_test; ++k) is_test[idx[k]] = true;
  } else {
    std::set<std::string> names;
    for (const auto& w : windows) names.insert(w.scene);
    std::vector<std::string> scenes(names.begin(), names.end());
    std::shuffle(scenes.begin(), scenes.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * scenes.size()));
    std::set<std::string> test_scenes(scenes.begin(), scenes.begin() + n_test);
    for (std::size_t k = 0; k < windows.size(); ++k) is_test[k] = test_scenes.count(windows[k].scene) > 0;
  }
  Split split;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    (is_test[k] ? split.test : split.train).push_back(windows[k]);
  }
  return split;
}

double quadratic_fit_residual(std::span<const Vec2> positions) {
  if (positions.size() < 3) throw std::invalid_argument("linearity needs at least 3 positions");
  const auto n = static_cast<Eigen::Index>(positions.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::MatrixXd rhs(n, 2);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = static_cast<double>(k);
    design(k, 0) = 1.0;
    design(k, 1) = t;
    design(k, 2) = t * t;
    rhs(k, 0) = positions[static_cast<std::size_t>(k)].x;
    rhs(k, 1) = positions[static_cast<std::size_t>(k)].y;
  }
  Eigen::MatrixXd coef = design.colPivHouseholderQr().solve(rhs);
  return (design * coef - rhs).squaredNorm();
}

Linearity classify_linearity(std::span<const Vec2> positions, double threshold) {
  return quadratic_fit_residual(positions) <= threshold ? Linearity::kLinear
                                                        : Linearity::kNonlinear;
}

Window rotate_window(const Window& window, double angle_rad) {
  Window w = window;
  for (auto& p : w.obs) p = rotate(p, angle_rad);
  for (auto& p : w.fut) p = rotate(p, angle_rad);
  for (auto& fs : w.frames) {
    fs.target_pos = rotate(fs.target_pos, angle_rad);
    fs.target_offset = rotate(fs.target_offset, angle_rad);
    for (auto& nb : fs.neighbors) {
      nb.pos = rotate(nb.pos, angle_rad);
      nb.offset = rotate(nb.offset, angle_rad);
    }
  }
  return w;
}

}  // namespace amenet

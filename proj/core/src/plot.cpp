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

#include <algorithm>
#include <cstdio>
#include <limits>

#include "amenet/harness.hpp"

namespace amenet {

namespace {

constexpr double kCanvas = 480.0;
constexpr double kMargin = 24.0;

struct Frame {
  double min_x, min_y, scale;
  double px(double x) const { return kMargin + (x - min_x) * scale; }
  double py(double y) const { return kCanvas - kMargin - (y - min_y) * scale; }
};

std::string polyline(const Frame& f, const std::vector<Vec2>& pts, const char* style) {
  std::string out = "<polyline fill=\"none\" ";
  out += style;
  out += " points=\"";
  char buf[48];
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::snprintf(buf, sizeof(buf), i == 0 ? "%.2f,%.2f" : " %.2f,%.2f", f.px(pts[i].x), f.py(pts[i].y));
    out += buf;
  }
  out += "\"/>\n";
  return out;
}

}  // namespace

std::string render_svg(const Window& window, const PredictionSet& set, std::size_t most_likely) {
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  auto extend = [&](const std::vector<Vec2>& pts) {
    for (const auto& p : pts) {
      lo_x = std::min(lo_x, p.x);
      hi_x = std::max(hi_x, p.x);
      lo_y = std::min(lo_y, p.y);
      hi_y = std::max(hi_y, p.y);
    }
  };
  extend(window.obs);
  extend(window.fut);
  for (const auto& s : set.samples) extend(s);
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1.0});
  const Frame f{lo_x, lo_y, (kCanvas - 2.0 * kMargin) / span};

  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" viewBox=\"0 0 480 480\">\n"
      "<rect width=\"480\" height=\"480\" fill=\"white\"/>\n";
  out += "<text x=\"8\" y=\"16\" font-family=\"monospace\" font-size=\"11\">" + window.id + "</text>\n";
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    if (i == most_likely) continue;
    std::vector<Vec2> path{window.obs.back()};
    path.insert(path.end(), set.samples[i].begin(), set.samples[i].end());
    out += polyline(f, path, "stroke=\"#4a7bd0\" stroke-opacity=\"0.45\" stroke-width=\"1.2\"");
  }
  std::vector<Vec2> gt{window.obs.back()};
  gt.insert(gt.end(), window.fut.begin(), window.fut.end());
  out += polyline(f, gt, "stroke=\"#2a9d4b\" stroke-width=\"2\" stroke-dasharray=\"6 4\"");
  if (most_likely < set.samples.size()) {
    std::vector<Vec2> ml{window.obs.back()};
    ml.insert(ml.end(), set.samples[most_likely].begin(), set.samples[most_likely].end());
    out += polyline(f, ml, "stroke=\"#d03a2a\" stroke-width=\"2\"");
  }
  out += polyline(f, window.obs, "stroke=\"black\" stroke-width=\"2.5\"");
  char buf[96];
  std::snprintf(buf, sizeof(buf), "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"black\"/>\n",
                f.px(window.obs.back().x), f.py(window.obs.back().y));
  out += buf;
  out +=
      "<text x=\"8\" y=\"470\" font-family=\"monospace\" font-size=\"10\">black: observed  green dashed: "
      "ground truth  blue: samples  red: most likely</text>\n</svg>\n";
  return out;
}

}  // namespace amenet

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

#include <gtest/gtest.h>

#include <numbers>

#include "amenet/maps.hpp"
#include "amenet/synth.hpp"
#include "oracles.hpp"

using namespace amenet;
using namespace amenet::maps;
using amenet::testing::Gen;

namespace {

FrameState with_neighbors(std::vector<Neighbor> nbs) {
  FrameState fs;
  fs.frame = 3;
  fs.neighbors = std::move(nbs);
  return fs;
}

int nonzero(const GridTensor& g, int channel) {
  int n = 0;
  for (int h = 0; h < g.height; ++h)
    for (int w = 0; w < g.width; ++w) n += g.at(channel, w, h) != 0.0;
  return n;
}

}  // namespace

TEST(MapCell, WorkedExample) {
  const MapConfig cfg;
  const auto c = map_cell({0, 0}, {0, 0}, {3.4, -2.1}, {1, 0}, cfg);
  ASSERT_TRUE(c);
  EXPECT_EQ(*c, (CellIndex{20, 13}));
}

TEST(MapCell, CoincidentNeighborIsCenter) {
  const auto c = map_cell({5, 5}, {0.3, 0.1}, {5, 5}, {0.3, 0.1}, MapConfig{});
  ASSERT_TRUE(c);
  EXPECT_EQ(*c, (CellIndex{16, 16}));
}

TEST(MapCell, OutOfRange) {
  const MapConfig cfg;
  EXPECT_FALSE(map_cell({0, 0}, {0, 0}, {40, 0}, {0, 0}, cfg));
  EXPECT_FALSE(map_cell({0, 0}, {0, 0}, {16, 0}, {0, 0}, cfg));  // floor(32) is past the edge
  EXPECT_TRUE(map_cell({0, 0}, {0, 0}, {-16, 0}, {0, 0}, cfg));
}

TEST(MapConfig, GridSizeValidation) {
  EXPECT_EQ(MapConfig{}.grid_size(), 32);
  MapConfig odd;
  odd.extent_m = 10.0;
  odd.cell_m = 3.0;
  EXPECT_THROW(odd.grid_size(), std::invalid_argument);
  MapConfig neg;
  neg.cell_m = 0.0;
  EXPECT_THROW(neg.grid_size(), std::invalid_argument);
  MapConfig fine;
  fine.extent_m = 4.0;
  fine.cell_m = 0.5;
  EXPECT_EQ(fine.grid_size(), 8);
}

TEST(DynamicMap, NoNeighborsIsZero) {
  const DynamicMap m = build_dynamic_map(with_neighbors({}), 1, MapConfig{});
  EXPECT_EQ(m.grid.channels, 3);
  EXPECT_EQ(m.grid.width, 32);
  EXPECT_EQ(m.grid.height, 32);
  EXPECT_TRUE(m.grid.all_zero());
}

TEST(DynamicMap, SingleNeighborMovingEast) {
  // 2.5 m/s over a 0.4 s step is a 1 m offset; with (3.4,-2.1) it lands in (20,13).
  const DynamicMap m = build_dynamic_map(with_neighbors({{2, {3.4, -2.1}, {1.0, 0.0}}}), 1, MapConfig{});
  EXPECT_EQ(m.grid.at(kOrientation, 20, 13), 0.0);
  EXPECT_EQ(m.grid.at(kSpeed, 20, 13), 1.0);
  EXPECT_EQ(m.grid.at(kPosition, 20, 13), 1.0);
  EXPECT_EQ(nonzero(m.grid, kPosition), 1);
  EXPECT_EQ(nonzero(m.grid, kSpeed), 1);
  EXPECT_EQ(nonzero(m.grid, kOrientation), 0);
}

TEST(DynamicMap, CircularMeanAcrossTheWrap) {
  // Headings of about 350 and 10 degrees in the same cell average to 0, not 180.
  const double a = 10.0 * std::numbers::pi / 180.0;
  const Vec2 up{std::cos(a), std::sin(a)}, down{std::cos(a), -std::sin(a)};
  FrameState fs = with_neighbors({{2, {2.2 - up.x, 2.2 - up.y}, up}, {3, {2.3 - down.x, 2.3 - down.y}, down}});
  const DynamicMap m = build_dynamic_map(fs, 1, MapConfig{});
  const double o = m.grid.at(kOrientation, 18, 18);
  EXPECT_TRUE(o < 1e-9 || o > 1.0 - 1e-9) << o;
  EXPECT_EQ(m.grid.at(kPosition, 18, 18), 1.0);
}

TEST(DynamicMap, SpeedMinMaxAcrossCells) {
  // 1 m/s and 3 m/s neighbors; empty cells hold 0 so the layer min is 0.
  FrameState fs = with_neighbors({{2, {2.5 - 0.4, 0.5}, {0.4, 0.0}}, {3, {-3.5, 5.5 - 1.2}, {0.0, 1.2}}});
  const DynamicMap m = build_dynamic_map(fs, 1, MapConfig{});
  EXPECT_DOUBLE_EQ(m.grid.at(kSpeed, 18, 16), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.grid.at(kSpeed, 12, 21), 1.0);
  EXPECT_DOUBLE_EQ(m.grid.at(kOrientation, 12, 21), 0.25);
}

TEST(DynamicMap, StationaryNeighborStaysZeroSpeed) {
  const DynamicMap m = build_dynamic_map(with_neighbors({{2, {1.5, 1.5}, {0, 0}}}), 1, MapConfig{});
  EXPECT_EQ(m.grid.at(kSpeed, 17, 17), 0.0);
  EXPECT_EQ(m.grid.at(kOrientation, 17, 17), 0.0);
  EXPECT_EQ(m.grid.at(kPosition, 17, 17), 1.0);
}

TEST(DynamicMap, TargetNeverMapsItself) {
  const DynamicMap m = build_dynamic_map(with_neighbors({{1, {0.5, 0.5}, {0.1, 0}}}), 1, MapConfig{});
  EXPECT_TRUE(m.grid.all_zero());
}

TEST(DynamicMap, MatchesBruteForceExactly) {
  Gen g(1234);
  const MapConfig cfg;
  for (int rep = 0; rep < 500; ++rep) {
    const FrameState fs = amenet::testing::random_frame(g, 5);
    const DynamicMap m = build_dynamic_map(fs, 1, cfg);
    const GridTensor oracle = amenet::testing::brute_force_dynamic_map(fs, 1, cfg.extent_m, cfg.cell_m, cfg.step_seconds);
    ASSERT_EQ(m.grid, oracle) << "case " << rep;
  }
}

TEST(DynamicMap, MatchesBruteForceOnOtherGeometry) {
  Gen g(99);
  MapConfig cfg;
  cfg.extent_m = 12.0;
  cfg.cell_m = 0.5;
  for (int rep = 0; rep < 200; ++rep) {
    const FrameState fs = amenet::testing::random_frame(g, 6);
    ASSERT_EQ(build_dynamic_map(fs, 1, cfg).grid,
              amenet::testing::brute_force_dynamic_map(fs, 1, cfg.extent_m, cfg.cell_m, cfg.step_seconds));
  }
}

TEST(DynamicMap, EntriesInUnitInterval) {
  Gen g(5);
  for (int rep = 0; rep < 300; ++rep) {
    const DynamicMap m = build_dynamic_map(amenet::testing::random_frame(g, 8), 1, MapConfig{});
    for (int c = 0; c < 3; ++c)
      for (int h = 0; h < 32; ++h)
        for (int w = 0; w < 32; ++w) {
          const double v = m.grid.at(c, w, h);
          ASSERT_TRUE(v >= 0.0 && v <= 1.0);
          if (c == kPosition) {
            ASSERT_TRUE(v == 0.0 || v == 1.0);
          }
        }
  }
}

TEST(DynamicMap, OutOfRangeNeighborChangesNothing) {
  Gen g(6);
  for (int rep = 0; rep < 200; ++rep) {
    FrameState fs = amenet::testing::random_frame(g, 5);
    const DynamicMap before = build_dynamic_map(fs, 1, MapConfig{});
    fs.neighbors.push_back({99, fs.target_pos + Vec2{g.uniform(17.5, 40.0), g.uniform(-40.0, 40.0)}, g.vec(-1, 1)});
    EXPECT_EQ(build_dynamic_map(fs, 1, MapConfig{}).grid, before.grid);
  }
}

TEST(DynamicMap, TranslationInvariant) {
  Gen g(7);
  for (int rep = 0; rep < 200; ++rep) {
    // Integer-valued positions keep the shifted differences exact.
    FrameState fs = amenet::testing::random_frame(g, 5);
    fs.target_pos = {std::round(fs.target_pos.x), std::round(fs.target_pos.y)};
    for (auto& nb : fs.neighbors) nb.pos = {std::round(nb.pos.x * 8) / 8, std::round(nb.pos.y * 8) / 8};
    FrameState moved = fs;
    moved.target_pos = moved.target_pos + Vec2{100, 100};
    for (auto& nb : moved.neighbors) nb.pos = nb.pos + Vec2{100, 100};
    EXPECT_EQ(build_dynamic_map(fs, 1, MapConfig{}).grid, build_dynamic_map(moved, 1, MapConfig{}).grid);
  }
}

TEST(DynamicMap, QuarterTurnRotatesGrid) {
  // Rotating the world by +90 degrees maps cell (w,h) to (n-1-h, w) and adds
  // 0.25 to the orientation layer (mod 1). Cell-centred positions avoid edge
  // cases at the floor boundary.
  Gen g(8);
  const MapConfig cfg;
  for (int rep = 0; rep < 100; ++rep) {
    FrameState fs;
    fs.target_pos = {0, 0};
    const int count = g.range(1, 4);
    for (int j = 0; j < count; ++j) {
      const Vec2 rel{g.range(-15, 14) + 0.5, g.range(-15, 14) + 0.5};
      const Vec2 off{static_cast<double>(g.range(-2, 2)), static_cast<double>(g.range(-2, 2))};
      fs.neighbors.push_back({j + 2, rel - off, off});
    }
    FrameState rot = fs;
    for (auto& nb : rot.neighbors) {
      nb.pos = {-nb.pos.y, nb.pos.x};
      nb.offset = {-nb.offset.y, nb.offset.x};
    }
    const GridTensor a = build_dynamic_map(fs, 1, cfg).grid;
    const GridTensor b = build_dynamic_map(rot, 1, cfg).grid;
    for (int h = 0; h < 32; ++h) {
      for (int w = 0; w < 32; ++w) {
        const int rw = 31 - h, rh = w;
        EXPECT_EQ(a.at(kPosition, w, h), b.at(kPosition, rw, rh));
        EXPECT_NEAR(a.at(kSpeed, w, h), b.at(kSpeed, rw, rh), 1e-12);
        if (a.at(kPosition, w, h) == 0.0) continue;
        const bool moving = a.at(kSpeed, w, h) > 0.0 || b.at(kSpeed, rw, rh) > 0.0;
        if (!moving) continue;
        double d = std::fmod(b.at(kOrientation, rw, rh) - a.at(kOrientation, w, h) + 2.0, 1.0);
        d = std::min(std::abs(d - 0.25), std::abs(d - 0.25 + 1.0));
        EXPECT_LT(d, 1e-9);
      }
    }
  }
}

TEST(OccupancyGrid, Examples) {
  const MapConfig cfg;
  EXPECT_TRUE(build_occupancy_grid(with_neighbors({}), 1, cfg).grid.all_zero());
  const OccupancyGrid o = build_occupancy_grid(with_neighbors({{2, {3.4, -2.1}, {1, 0}}}), 1, cfg);
  EXPECT_EQ(o.grid.channels, 1);
  EXPECT_EQ(o.grid.at(0, 19, 13), 1.0);
  EXPECT_EQ(nonzero(o.grid, 0), 1);
}

TEST(OccupancyGrid, CountMatchesDistinctInRangeNeighbors) {
  Gen g(10);
  for (int rep = 0; rep < 100; ++rep) {
    FrameState fs;
    fs.target_pos = g.vec(-5, 5);
    const int n = g.range(0, 10);
    std::set<std::pair<int, int>> used;
    for (int j = 0; j < n; ++j) {
      const int w = g.range(0, 31), h = g.range(0, 31);
      if (!used.insert({w, h}).second) continue;
      fs.neighbors.push_back({j + 2, fs.target_pos + Vec2{w - 16 + 0.5, h - 16 + 0.5}, g.vec(-3, 3)});
    }
    EXPECT_EQ(nonzero(build_occupancy_grid(fs, 1, MapConfig{}).grid, 0), static_cast<int>(used.size()));
  }
}

TEST(MapSequence, OneMapPerFrame) {
  SynthSpec spec;
  spec.kind = SynthKind::kStraight;
  spec.agent_count = 1;
  const auto ws = make_windows(synth_scene(spec).scene, {});
  ASSERT_EQ(ws.size(), 1u);
  const auto obs = map_sequence(ws[0], Span::kObserved, MapConfig{});
  const auto fut = map_sequence(ws[0], Span::kFuture, MapConfig{});
  ASSERT_EQ(obs.size(), 8u);
  EXPECT_EQ(fut.size(), 12u);
  for (const auto& m : obs) EXPECT_TRUE(m.grid.all_zero());
  EXPECT_EQ(obs[3].frame, ws[0].start_frame + 3);
  EXPECT_EQ(fut[0].frame, ws[0].start_frame + 8);
}

TEST(MapSequence, SceneTranslationLeavesMapsUnchanged) {
  SynthSpec spec;
  spec.kind = SynthKind::kStraight;
  spec.agent_count = 4;
  spec.speed_mps = 1.25;  // 0.5 m steps, exact in binary
  Scene s = synth_scene(spec).scene;
  Scene moved = s;
  for (auto& t : moved.trajectories)
    for (auto& p : t.points) p.pos = p.pos + Vec2{100, 100};
  const auto a = make_windows(s, {});
  const auto b = make_windows(moved, {});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ma = map_sequence(a[i], Span::kObserved, MapConfig{});
    const auto mb = map_sequence(b[i], Span::kObserved, MapConfig{});
    for (std::size_t k = 0; k < ma.size(); ++k) EXPECT_EQ(ma[k].grid, mb[k].grid);
    EXPECT_FALSE(ma[5].grid.all_zero());
  }
}

TEST(MapDump, HeaderAndLayout) {
  const DynamicMap m = build_dynamic_map(with_neighbors({{2, {3.4, -2.1}, {1.0, 0.0}}}), 1, MapConfig{});
  const std::string dump = format_map_dump(m, MapConfig{});
  EXPECT_EQ(dump.rfind("frame 3\ntarget 1\nW 32\nH 32\ncell_m 1.000000\nlayer orientation\n", 0), 0u);
  std::size_t lines = 0;
  for (char c : dump) lines += c == '\n';
  EXPECT_EQ(lines, 5u + 3u * 33u);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "arenatrack/analytics.hpp"
#include "arenatrack/render.hpp"

using namespace arenatrack;

namespace {

Trajectory line_track(int n, double fps, const std::function<Point2d(double)>& pos) {
  Trajectory t;
  for (int i = 0; i < n; ++i) {
    const double time = i / fps;
    t.push_back({i, time, pos(time), 1});
  }
  return t;
}

// Axis-aligned world corners of a w x h arena with its NW corner at the origin.
ArenaCorners box(double w, double h) { return {{0, 0}, {w, 0}, {0, h}, {w, h}}; }

}  // namespace

TEST(RealSpace, ManualScaleAndTime) {
  const CameraModel m = CameraModel::manual(10, 9.5);
  const auto t = to_real_space({{360, 0, 1, {100, 95}, 1}}, m, 25);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_DOUBLE_EQ(t[0].pos.x, 10);
  EXPECT_DOUBLE_EQ(t[0].pos.y, 10);
  EXPECT_DOUBLE_EQ(t[0].time, 14.4);
}

TEST(Postprocess, InterpolationWindow) {
  Trajectory t{{0, 0, {0, 0}, 1}, {4, 0.16, {4, 0}, 1}};
  const auto out = postprocess(t, true, 25, false, 25);
  ASSERT_EQ(out.size(), 5u);
  for (int k = 1; k <= 3; ++k) {
    EXPECT_DOUBLE_EQ(out[k].pos.x, k);
    EXPECT_EQ(out[k].label, static_cast<int>(PointLabel::Occluded));
  }
  Trajectory far{{0, 0, {0, 0}, 1}, {31, 1.24, {4, 0}, 1}};
  EXPECT_EQ(postprocess(far, true, 25, false, 25).size(), 2u);
  const auto still = line_track(20, 25, [](double) { return Point2d{3, 4}; });
  for (const auto& p : postprocess(still, false, 25, true, 25)) {
    EXPECT_DOUBLE_EQ(p.pos.x, 3);
    EXPECT_DOUBLE_EQ(p.pos.y, 4);
  }
}

TEST(Speed, AnalyticLinearMotion) {
  const auto still = line_track(50, 25, [](double) { return Point2d{1, 1}; });
  for (const auto& s : instantaneous_speed(still, 2)) EXPECT_EQ(s.value, 0);
  const auto moving = line_track(100, 25, [](double t) { return Point2d{10 * t, 0}; });
  const auto v = instantaneous_speed(moving, 2);
  EXPECT_EQ(v.size(), 96u);
  for (const auto& s : v) EXPECT_NEAR(s.value, 10, 1e-9);
  for (const auto& a : instantaneous_accel(v, 2)) EXPECT_NEAR(a.value, 0, 1e-9);
}

TEST(Accel, AnalyticAndAbsolute) {
  std::vector<RateSample> up, down;
  for (int i = 0; i < 60; ++i) {
    up.push_back({i, i / 25.0, 5 * i / 25.0});
    down.push_back({i, i / 25.0, 100 - 5 * i / 25.0});
  }
  for (const auto& a : instantaneous_accel(up, 2)) EXPECT_NEAR(a.value, 5, 1e-9);
  for (const auto& a : instantaneous_accel(down, 2)) EXPECT_NEAR(a.value, 5, 1e-9);
}

TEST(Zones, EdgeDistancesAndIndex) {
  const ArenaCorners a = box(300, 200);
  EXPECT_DOUBLE_EQ(line_distance({150, 100}, a.nw, a.ne), 100);
  EXPECT_EQ(zone_index(35, 20, 10), 1);
  EXPECT_EQ(zone_index(40, 20, 10), 1);
  EXPECT_EQ(zone_index(40.001, 20, 10), 2);
  EXPECT_EQ(zone_index(0, 20, 10), 0);
  EXPECT_EQ(zone_index(1e6, 20, 10), 9);
  const EdgeZones z = edge_zones({{150, 35}}, a, 20, 10);
  EXPECT_EQ(z.n.counts[1], 1);
  EXPECT_EQ(z.all.counts[1], 1);
  EXPECT_EQ(z.s.counts[zone_index(165, 20, 10)], 1);
}

TEST(Zones, RadialRing) {
  std::vector<Point2d> ring;
  for (int i = 0; i < 36; ++i) {
    const double t = 2 * std::numbers::pi * i / 36;
    ring.push_back({100 + 50 * std::cos(t), 100 + 50 * std::sin(t)});
  }
  const ZoneCounts z = radial_zones(ring, {100, 100}, 20, 10);
  EXPECT_EQ(z.counts[2], 36);
  const ZoneCounts c = radial_zones(std::vector<Point2d>(5, {7, 7}), {7, 7}, 20, 10);
  EXPECT_EQ(c.counts[0], 5);
}

TEST(Exploration, ConfinedAndSweep) {
  const ArenaCorners a = box(80, 80);
  const auto one = exploration_grid(std::vector<Point2d>(10, {5, 5}), a, 20, false);
  EXPECT_EQ(one.explored(), 1);
  EXPECT_EQ(one.number_of_areas(), 16);
  std::vector<Point2d> sweep;
  for (double y = 1; y < 80; y += 2)
    for (double x = 1; x < 80; x += 2) sweep.push_back({x, y});
  const auto g = exploration_grid(sweep, a, 20, false);
  EXPECT_EQ(g.rows, 4);
  EXPECT_EQ(g.cols, 4);
  EXPECT_EQ(g.explored(), 16);
  EXPECT_EQ(g.total(), static_cast<std::int64_t>(sweep.size()));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) EXPECT_EQ(g.at(r, c), 100);
}

TEST(Transitions, GapProducesOnePair) {
  const auto full = line_track(500, 25, [](double) { return Point2d{0, 0}; });
  EXPECT_TRUE(detect_transitions(full, 7, 0, full.back().time).empty());
  Trajectory gap;
  for (const auto& p : full)
    if (p.time < 3 || p.time >= 13) gap.push_back(p);
  const auto e = detect_transitions(gap, 7, 0, full.back().time);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].label, 0);
  EXPECT_EQ(e[1].label, 1);
}

TEST(Frozen, StillAndOscillating) {
  const auto still = line_track(500, 25, [](double) { return Point2d{40, 40}; });
  const auto f = detect_frozen_events(still, 5, 3);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_NEAR(f[0].duration, still.back().time, 1e-12);
  const auto osc =
      line_track(500, 25, [](double t) { return Point2d{40 + 10 * std::sin(2 * std::numbers::pi * t), 40}; });
  EXPECT_TRUE(detect_frozen_events(osc, 5, 3).empty());
}

TEST(Stats, StationaryVisibleTrack) {
  const auto t = line_track(100, 25, [](double) { return Point2d{10, 10}; });
  const auto v = instantaneous_speed(t, 2);
  const auto a = instantaneous_accel(v, 2);
  const auto g = exploration_grid({{10, 10}}, box(80, 80), 20, false);
  const StatsSummary s = compute_stats(t, v, a, g, {}, {}, 100, 25, 1.0);
  EXPECT_EQ(*s.mobility_rate, 0);
  EXPECT_EQ(s.total_distance, 0);
  EXPECT_EQ(*s.visibility_rate, 1);
  EXPECT_DOUBLE_EQ(*s.exploration_rate, 1.0 / 16);
  const StatsSummary partial = compute_stats(t, v, a, g, {}, {}, 125, 25, 1.0);
  EXPECT_DOUBLE_EQ(*partial.visibility_rate, 100.0 / 125);
  EXPECT_DOUBLE_EQ(partial.invisible_time, 25.0 / 25);
}

TEST(Mirror, FlipIsInvolution) {
  const ArenaCorners a = box(100, 60);
  const VirtualPlacement v = mirror_placement(2, 50, 400, 640, 480);
  EXPECT_FALSE(v.flip_x);
  EXPECT_TRUE(v.flip_y);
  const Point2d p = project_to_virtual({30, 10}, a, v, 100, 60);
  EXPECT_DOUBLE_EQ(p.x, 30);
  EXPECT_DOUBLE_EQ(p.y, 50);
  const Point2d back = project_to_virtual(p, a, v, 100, 60);
  EXPECT_DOUBLE_EQ(back.y, 10);
  EXPECT_FALSE(mirror_placement(2, 50, 100, 640, 480).flip_y);
}

TEST(ColorScale, Endpoints) {
  EXPECT_EQ(color_scale(0), (Rgb{0, 0, 255}));
  EXPECT_EQ(color_scale(1), (Rgb{255, 0, 0}));
  EXPECT_EQ(color_scale(0.5), (Rgb{128, 255, 0}));
}

TEST(Heatmap, NormalizedByMaximum) {
  RgbImage back(4, 1);
  std::fill(back.data.begin(), back.data.end(), 255);
  const ZoneMap zones = make_zone_map(4, 1, [](int x, int) { return x < 2 ? 0 : 1; });
  RenderParams p;
  p.zone_width = 0;
  const RgbImage one = render_heatmap(back, zones, {0.0, 3.0}, p);
  EXPECT_EQ(one.px(0, 0)[0], 255);
  EXPECT_EQ(one.px(0, 0)[2], 255);  // zero-frequency zone keeps the backdrop
  EXPECT_EQ(one.px(3, 0)[0], (255 + 255 + 1) / 2);
  EXPECT_EQ(one.px(3, 0)[1], (255 + 0 + 1) / 2);
  const RgbImage two = render_heatmap(back, zones, {1.0, 2.0}, p);
  const Rgb half = color_scale(0.5);
  EXPECT_EQ(two.px(0, 0)[0], (255 + half[0] + 1) / 2);
  EXPECT_EQ(two.px(0, 0)[1], (255 + half[1] + 1) / 2);
}

TEST(Trajectories, ColorsAndRasterization) {
  RgbImage back(60, 40);
  const RenderParams p;
  EXPECT_EQ(render_trajectories(back, {}, p).data, back.data);
  PixelTrack a{1, {{0, {5, 5}}, {1, {50, 30}}}};
  PixelTrack b{2, {{0, {5, 35}}, {1, {55, 35}}}};
  const RgbImage img = render_trajectories(back, {a, b}, p);
  EXPECT_NE(track_color(0), track_color(1));
  std::set<Rgb> colors;
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 60; ++x) {
      const std::uint8_t* d = img.px(x, y);
      const Rgb c{d[0], d[1], d[2]};
      if (c == Rgb{0, 0, 0}) continue;
      colors.insert(c);
      if (c == track_color(0)) {
        // Distance from the analytic segment (5,5)-(50,30).
        const double dist = std::abs(25.0 * x - 45.0 * y + 45.0 * 5 - 25.0 * 5) / std::hypot(25.0, 45.0);
        EXPECT_LE(dist, 1.0) << x << "," << y;
      }
    }
  EXPECT_EQ(colors.size(), 2u);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "arenatrack/arena.hpp"
#include "arenatrack/background.hpp"
#include "arenatrack/detection.hpp"
#include "arenatrack/errors.hpp"
#include "arenatrack/imaging.hpp"

using namespace arenatrack;

namespace {

Frame four_squares() {
  Frame f(700, 700, 20);
  for (int sy : {20, 380})
    for (int sx : {20, 380})
      for (int y = sy; y < sy + 300; ++y)
        for (int x = sx; x < sx + 300; ++x) f.at(x, y) = 220;
  return f;
}

Arena whole_frame_arena(int w, int h) {
  Arena a;
  a.rect = {0, 0, w, h};
  a.area.mask = BinaryMask(w, h, true);
  return a;
}

}  // namespace

TEST(ArenaAutomatic, FourSquaresWithBalancedClosing) {
  ArenaParams p;
  p.mins = 10000;
  p.dilt = 1;
  p.erot = 1;
  const auto arenas = define_arenas_automatic(four_squares(), p);
  ASSERT_EQ(arenas.size(), 4u);
  const Rect expected[4] = {{20, 20, 320, 320}, {380, 20, 680, 320}, {20, 380, 320, 680}, {380, 380, 680, 680}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(arenas[i].rect.x0, expected[i].x0);
    EXPECT_EQ(arenas[i].rect.y0, expected[i].y0);
    EXPECT_EQ(arenas[i].rect.x1, expected[i].x1);
    EXPECT_EQ(arenas[i].rect.y1, expected[i].y1);
    EXPECT_EQ(arenas[i].name, "Arena" + std::to_string(i + 1));
  }
}

TEST(ArenaAutomatic, DefaultClosingInsetsByNetErosion) {
  ArenaParams p;  // elms 7 (radius 3), one dilation, four erosions
  p.mins = 10000;
  const auto arenas = define_arenas_automatic(four_squares(), p);
  ASSERT_EQ(arenas.size(), 4u);
  const int inset = 3 * (p.erot - p.dilt);
  EXPECT_EQ(arenas[0].rect.x0, 20 + inset);
  EXPECT_EQ(arenas[0].rect.x1, 320 - inset);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      const Rect a = arenas[i].rect, b = arenas[j].rect;
      EXPECT_TRUE(a.x1 <= b.x0 || b.x1 <= a.x0 || a.y1 <= b.y0 || b.y1 <= a.y0);
    }
}

TEST(ArenaAutomatic, NoArenaErrors) {
  ArenaParams p;
  EXPECT_THROW(define_arenas_automatic(Frame(200, 200, 10), p), ProcessingError);
  Frame small(400, 400, 10);
  for (int y = 100; y < 200; ++y)
    for (int x = 100; x < 200; ++x) small.at(x, y) = 240;
  EXPECT_THROW(define_arenas_automatic(small, p), ProcessingError);  // 10000 < 100000
}

TEST(ArenaManual, CircleFitReducesRadius) {
  Frame f(300, 300, 10);
  const double R = 80;
  for (int y = 0; y < 300; ++y)
    for (int x = 0; x < 300; ++x)
      if (std::hypot(x - 150, y - 150) <= R) f.at(x, y) = 230;
  ArenaParams p;
  p.fite = true;
  p.redr = 1;
  p.dilt = 1;
  p.erot = 1;
  const auto out = define_arenas_manual(f, {{40, 40, 260, 260}}, {}, p);
  ASSERT_TRUE(out[0].arena.has_value());
  ASSERT_TRUE(out[0].arena->area.circle.has_value());
  EXPECT_NEAR(out[0].arena->area.circle->radius, R - 1, 0.5);
  const double area = static_cast<double>(out[0].arena->area.mask.count());
  EXPECT_NEAR(std::sqrt(area / std::numbers::pi), R - 1, 0.5);
}

TEST(ArenaManual, LargestComponentKeptAndFailuresIsolated) {
  Frame f(300, 200, 10);
  for (int y = 20; y < 80; ++y)
    for (int x = 20; x < 80; ++x) f.at(x, y) = 230;  // 3600
  for (int y = 20; y < 60; ++y)
    for (int x = 120; x < 160; ++x) f.at(x, y) = 230;  // 1600
  ArenaParams p;
  p.dilt = 0;
  p.erot = 0;
  const auto out = define_arenas_manual(f, {{0, 0, 200, 100}, {0, 120, 300, 200}}, {"left"}, p);
  ASSERT_EQ(out.size(), 2u);
  ASSERT_TRUE(out[0].arena.has_value());
  EXPECT_EQ(out[0].arena->name, "left");
  EXPECT_EQ(out[0].arena->area.mask.count(), 3600);
  EXPECT_EQ(out[0].arena->rect.x0, 20);
  EXPECT_EQ(out[0].arena->rect.x1, 80);
  EXPECT_FALSE(out[1].arena.has_value());
  EXPECT_FALSE(out[1].error.empty());
}

TEST(ArenaFiles, RoundTrip) {
  const std::string dir = testing::TempDir();
  save_arena_rects({{1, 2, 30, 40}, {5, 6, 70, 80}}, dir + "/a.txt");
  const auto r = load_arena_rects(dir + "/a.txt");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1].x1, 70);
  save_arena_names({"A", "B"}, dir + "/n.txt");
  EXPECT_EQ(load_arena_names(dir + "/n.txt"), (std::vector<std::string>{"A", "B"}));
}

TEST(Gmm, ConstantVideoBecomesBackground) {
  GmmParams p;
  p.enabled = true;
  p.learning_rate = 0.3;
  BackgroundModel bg(16, 16, p);
  bg.apply(Frame(16, 16, 128));
  EXPECT_EQ(bg.apply(Frame(16, 16, 128)).count(), 0);
}

TEST(Gmm, MatchTestCreatesComponent) {
  GmmParams p;
  GmmComponent c[5] = {{1.0f, 100.0f, 100.0f}};
  int n = 1;
  // (200 - 100)^2 / 100 = 100 > 25
  EXPECT_TRUE(gmm_update_pixel(c, n, 200.0f, 0.01, p));
  EXPECT_EQ(n, 2);
}

TEST(Gmm, ScalarRecursionTrace) {
  GmmParams p;
  const double alpha = 0.5;
  GmmComponent c[5];
  int n = 0;
  // Independent recursion for one always-matching Gaussian.
  double w = 1, mu = 100, var = kInitialVariance;
  gmm_update_pixel(c, n, 100.0f, alpha, p);
  for (double x : {100.0, 120.0}) {
    gmm_update_pixel(c, n, static_cast<float>(x), alpha, p);
    w = (1 - alpha) * w + alpha;
    const double rho = alpha / w;
    const double d = x - mu;
    mu += rho * d;
    var = std::max<double>(kMinVariance, (1 - rho) * var + rho * d * d);
  }
  ASSERT_EQ(n, 1);
  EXPECT_NEAR(c[0].mean, mu, 1e-4);
  EXPECT_NEAR(c[0].var, var, 1e-3);
  EXPECT_NEAR(c[0].mean, 110.0, 1e-4);
  EXPECT_NEAR(c[0].var, 256.25, 1e-3);
}

TEST(Gmm, DisabledModelIsAllForeground) {
  BackgroundModel bg(8, 8, GmmParams{});
  EXPECT_EQ(bg.apply(Frame(8, 8, 3)).count(), 64);
}

TEST(Gmm, ParallelMatchesSerial) {
  GmmParams p;
  p.enabled = true;
  p.learning_rate = -1;
  p.history = 20;
  BackgroundModel a(40, 30, p), b(40, 30, p);
  std::mt19937 rng(2);
  std::normal_distribution<double> noise(0, 6);
  for (int t = 0; t < 40; ++t) {
    Frame f(40, 30, 120);
    for (auto& v : f.pixels) v = static_cast<std::uint8_t>(std::clamp(120 + noise(rng), 0.0, 255.0));
    if (t > 25)
      for (int y = 5; y < 12; ++y)
        for (int x = 5; x < 12; ++x) f.at(x, y) = 20;
    EXPECT_EQ(a.apply(f).bits, b.apply_serial(f).bits);
  }
}

TEST(Detection, DarkSquareSingleDetection) {
  Frame f(100, 100, 220);
  for (int y = 40; y < 60; ++y)
    for (int x = 30; x < 50; ++x) f.at(x, y) = 30;
  const Arena a = whole_frame_arena(100, 100);
  DetectionParams p;
  const auto d = detect(f, a, BinaryMask(100, 100, true), p);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NEAR(d[0].centroid.x, 39.5, 0.5);
  EXPECT_NEAR(d[0].centroid.y, 49.5, 0.5);
  // A 2x2 speck stays below det.mins.
  for (int y = 10; y < 12; ++y)
    for (int x = 80; x < 83; ++x) f.at(x, y) = 30;
  EXPECT_EQ(detect(f, a, BinaryMask(100, 100, true), p).size(), 1u);
}

TEST(Detection, AxisRatioFilter) {
  Frame f(200, 60, 220);
  for (int y = 28; y < 32; ++y)
    for (int x = 50; x < 150; ++x) f.at(x, y) = 20;
  const Arena a = whole_frame_arena(200, 60);
  DetectionParams p;
  p.dilt = 0;
  p.erot = 0;
  const auto kept = segment(f, a, BinaryMask(200, 60, true), p);
  ASSERT_EQ(kept.size(), 1u);
  // Uniform rectangle: axis ratio sqrt(var_x / var_y) = L / W.
  EXPECT_NEAR(axis_ratio(kept[0].blob), 25.0, 1e-9);
  p.mash = 5;
  EXPECT_TRUE(detect(f, a, BinaryMask(200, 60, true), p).empty());
}

TEST(Detection, ForegroundAndAreaMasksRestrict) {
  Frame f(60, 60, 220);
  for (int y = 10; y < 30; ++y)
    for (int x = 10; x < 30; ++x) f.at(x, y) = 20;
  Arena a = whole_frame_arena(60, 60);
  DetectionParams p;
  EXPECT_TRUE(detect(f, a, BinaryMask(60, 60, false), p).empty());
  a.area.mask = BinaryMask(60, 60, false);
  EXPECT_TRUE(detect(f, a, BinaryMask(60, 60, true), p).empty());
}

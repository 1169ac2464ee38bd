#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "arenatrack/calibration.hpp"
#include "arenatrack/errors.hpp"
#include "arenatrack/geometry.hpp"

using namespace arenatrack;

TEST(Polygon, RectangleContourReducesToFourVertices) {
  std::vector<Point2d> c;
  for (int x = 0; x < 10; ++x) c.push_back({double(x), 0});
  for (int y = 0; y < 6; ++y) c.push_back({10, double(y)});
  for (int x = 10; x > 0; --x) c.push_back({double(x), 6});
  for (int y = 6; y > 0; --y) c.push_back({0, double(y)});
  EXPECT_EQ(approximate_polygon(c, 1.0).size(), 4u);
  EXPECT_EQ(approximate_polygon(c, 0.0).size(), 4u);  // collinear points carry no error
}

TEST(Polygon, CircleWithinTolerance) {
  std::vector<Point2d> c;
  for (int i = 0; i < 720; ++i) {
    const double a = 2 * std::numbers::pi * i / 720;
    c.push_back({100 * std::cos(a), 100 * std::sin(a)});
  }
  const auto poly = approximate_polygon(c, 1.0);
  EXPECT_LT(poly.size(), c.size());
  for (const auto& p : c) {
    double best = 1e9;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point2d a = poly[i], b = poly[(i + 1) % poly.size()];
      const double vx = b.x - a.x, vy = b.y - a.y;
      const double t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / (vx * vx + vy * vy), 0.0, 1.0);
      best = std::min(best, std::hypot(a.x + t * vx - p.x, a.y + t * vy - p.y));
    }
    EXPECT_LE(best, 1.0 + 1e-9);
  }
}

TEST(Polygon, ZeroToleranceKeepsVertices) {
  const std::vector<Point2d> c{{0, 0}, {5, 1}, {9, 0}, {8, 7}, {1, 6}};
  EXPECT_EQ(approximate_polygon(c, 0.0).size(), c.size());
  EXPECT_THROW(approximate_polygon({{0, 0}, {1, 1}}, 1.0), ConfigError);
}

TEST(Geometry, EnclosingCircleOfSquareCorners) {
  const Circle c = min_enclosing_circle({{0, 0}, {2, 0}, {0, 2}, {2, 2}, {1, 1}});
  EXPECT_NEAR(c.center.x, 1, 1e-12);
  EXPECT_NEAR(c.center.y, 1, 1e-12);
  EXPECT_NEAR(c.radius, std::sqrt(2.0), 1e-12);
}

TEST(Distortion, ForwardModel) {
  const DistortionCoefficients zero;
  const Point2d p = distort_point({0.3, -0.2}, zero);
  EXPECT_DOUBLE_EQ(p.x, 0.3);
  EXPECT_DOUBLE_EQ(p.y, -0.2);
  DistortionCoefficients d;
  d.k1 = 0.3;
  d.p1 = 0.01;
  d.k2 = -0.2;
  const Point2d o = distort_point({0, 0}, d);
  EXPECT_EQ(o.x, 0);
  EXPECT_EQ(o.y, 0);
  DistortionCoefficients k;
  k.k1 = 0.1;
  const Point2d q = distort_point({0.5, 0}, k);
  EXPECT_NEAR(q.x, 0.5125, 1e-15);
  EXPECT_EQ(q.y, 0);
}

TEST(Distortion, InverseResidual) {
  DistortionCoefficients d;
  d.k1 = -0.05;
  const Point2d q = undistort_point({0.3, 0.4}, d);
  const Point2d back = distort_point(q, d);
  EXPECT_NEAR(back.x, 0.3, 1e-9);
  EXPECT_NEAR(back.y, 0.4, 1e-9);
}

TEST(Distortion, RoundTripGrid) {
  DistortionCoefficients d;
  d.k1 = 0.1;
  for (int i = 0; i <= 16; ++i)
    for (int j = 0; j <= 16; ++j) {
      const Point2d q{-0.8 + 0.1 * i, -0.8 + 0.1 * j};
      const Point2d r = undistort_point(distort_point(q, d), d);
      EXPECT_NEAR(r.x, q.x, 1e-6);
      EXPECT_NEAR(r.y, q.y, 1e-6);
    }
}

TEST(Undistortion, IdentityModelCopiesFrame) {
  CameraModel m = CameraModel::manual(10, 9.5);
  EXPECT_TRUE(is_identity_map(m));
  Frame f(20, 10);
  for (std::size_t i = 0; i < f.pixels.size(); ++i) f.pixels[i] = static_cast<std::uint8_t>(i * 7);
  EXPECT_EQ(undistort_frame(f, build_undistortion_map(m, 20, 10)).pixels, f.pixels);
}

TEST(Undistortion, GridLinesLandOnAnalyticPositions) {
  // Raw frame rendered through the forward model; undistortion must put the
  // straight grid lines back at their ideal columns.
  CameraModel m;
  m.camera_matrix = {{{300, 0, 160}, {0, 300, 120}, {0, 0, 1}}};
  m.distortion.k1 = 0.1;
  const int W = 320, H = 240;
  auto ideal = [](double x, double y) {
    const double gx = std::fmod(x + 1000, 40.0), gy = std::fmod(y + 1000, 40.0);
    return (std::min(gx, 40 - gx) < 1.5 || std::min(gy, 40 - gy) < 1.5) ? 0.0 : 255.0;
  };
  Frame raw(W, H);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const Point2d u = normalized_to_pixel(undistort_point(pixel_to_normalized({double(x), double(y)}, m), m.distortion), m);
      raw.at(x, y) = static_cast<std::uint8_t>(ideal(u.x, u.y));
    }
  const Frame und = undistort_frame(raw, build_undistortion_map(m, W, H));
  // Column darkness profile along row 120 should dip at multiples of 40.
  for (int gx = 40; gx < W - 40; gx += 40) {
    double sum = 0, wsum = 0;
    for (int x = gx - 4; x <= gx + 4; ++x) {
      double dark = 0;
      for (int y = 100; y < 140; ++y)
        if (std::fmod(y + 1000.0, 40.0) > 4 && std::fmod(y + 1000.0, 40.0) < 36) dark += 255 - und.at(x, y);
      sum += dark * x;
      wsum += dark;
    }
    ASSERT_GT(wsum, 0);
    EXPECT_NEAR(sum / wsum, gx, 0.5);
  }
}

TEST(WorldMapping, ManualScale) {
  const CameraModel m = CameraModel::manual(10, 9.5);
  const Point2d w = pixel_to_world({100, 95}, m);
  EXPECT_DOUBLE_EQ(w.x, 10);
  EXPECT_DOUBLE_EQ(w.y, 10);
  const Point2d o = pixel_to_world({0, 0}, m);
  EXPECT_EQ(o.x, 0);
  EXPECT_EQ(o.y, 0);
}

TEST(WorldMapping, RoundTrip) {
  CameraModel m;
  m.camera_matrix = {{{812.4, 0, 633.1}, {0, 809.7, 352.9}, {0, 0, 1}}};
  m.rotation = {{{0.998, -0.05, 0.01}, {0.05, 0.998, 0.02}, {-0.011, -0.019, 0.9997}}};
  m.translation = {-30, 12, 640};
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0, 1000);
  for (int i = 0; i < 50; ++i) {
    const Point2d p{u(rng), u(rng) * 0.7};
    const Point2d q = world_to_pixel(pixel_to_world(p, m), m);
    EXPECT_NEAR(q.x, p.x, 1e-9);
    EXPECT_NEAR(q.y, p.y, 1e-9);
  }
}

TEST(CalibratorFile, DecimalCommaAndRoundTrip) {
  const std::string text =
      "10 0 0\n0 9,5 0\n0 0 1\n1 0 0\n0 1 0\n0 0 1\n0 0 0\n0 0 0 0 0 0 0 0 0 0 0 0\n";
  const CameraModel m = parse_calibrator(text);
  EXPECT_DOUBLE_EQ(m.fx(), 10);
  EXPECT_DOUBLE_EQ(m.fy(), 9.5);
  const std::string canonical = format_calibrator(m);
  EXPECT_EQ(format_calibrator(parse_calibrator(canonical)), canonical);
}

TEST(CalibratorFile, MissingRotationRowsFail) {
  try {
    parse_calibrator("10 0 0\n0 9.5 0\n0 0 1\n1 0 0\n", "cal");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("rotation row 2"), std::string::npos) << e.what();
  }
}

#include "arenatrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "arenatrack/errors.hpp"

namespace arenatrack {

double Ellipse::area() const { return std::numbers::pi * major_r * minor_r; }

namespace {

double dist(Point2d a, Point2d b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool inside(const Circle& c, Point2d p) { return dist(c.center, p) <= c.radius * (1.0 + 1e-12) + 1e-9; }

Circle circle2(Point2d a, Point2d b) {
  return {{(a.x + b.x) / 2, (a.y + b.y) / 2}, dist(a, b) / 2};
}

Circle circle3(Point2d a, Point2d b, Point2d c) {
  const double bx = b.x - a.x, by = b.y - a.y, cx = c.x - a.x, cy = c.y - a.y;
  const double d = 2 * (bx * cy - by * cx);
  if (std::abs(d) < 1e-12) {
    Circle best = circle2(a, b);
    for (const Circle& k : {circle2(a, c), circle2(b, c)})
      if (k.radius > best.radius) best = k;
    return best;
  }
  const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  const Point2d center{a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
  return {center, std::max({dist(center, a), dist(center, b), dist(center, c)})};
}

double cross(Point2d o, Point2d a, Point2d b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

double seg_dist(Point2d p, Point2d a, Point2d b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return dist(p, a);
  return std::abs(cross(a, b, p)) / std::sqrt(len2);
}

void dp_chain(const std::vector<Point2d>& pts, std::size_t first, std::size_t last, double tol,
              std::vector<char>& keep) {
  std::vector<std::pair<std::size_t, std::size_t>> stack{{first, last}};
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    if (b <= a + 1) continue;
    double best = -1.0;
    std::size_t idx = a;
    for (std::size_t i = a + 1; i < b; ++i) {
      const double d = seg_dist(pts[i % pts.size()], pts[a % pts.size()], pts[b % pts.size()]);
      if (d > best) {
        best = d;
        idx = i;
      }
    }
    if (best > tol) {
      keep[idx % pts.size()] = 1;
      stack.push_back({a, idx});
      stack.push_back({idx, b});
    }
  }
}

}  // namespace

Circle min_enclosing_circle(std::vector<Point2d> points) {
  if (points.empty()) return {};
  if (points.size() > 16) points = convex_hull(std::move(points));
  std::mt19937 rng(12345);
  std::shuffle(points.begin(), points.end(), rng);
  Circle c{points[0], 0.0};
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (inside(c, points[i])) continue;
    c = {points[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (inside(c, points[j])) continue;
      c = circle2(points[i], points[j]);
      for (std::size_t k = 0; k < j; ++k)
        if (!inside(c, points[k])) c = circle3(points[i], points[j], points[k]);
    }
  }
  return c;
}

Ellipse ellipse_from_moments(Point2d centroid, double sxx, double syy, double sxy) {
  const double mean = (sxx + syy) / 2;
  const double diff = (sxx - syy) / 2;
  const double root = std::sqrt(diff * diff + sxy * sxy);
  const double l1 = mean + root;
  const double l2 = std::max(mean - root, 0.0);
  Ellipse e;
  e.center = centroid;
  e.major_r = 2.0 * std::sqrt(std::max(l1, 0.0));
  e.minor_r = 2.0 * std::sqrt(l2);
  e.angle = 0.5 * std::atan2(2 * sxy, sxx - syy);
  return e;
}

std::vector<Point2d> convex_hull(std::vector<Point2d> p) {
  std::sort(p.begin(), p.end(), [](Point2d a, Point2d b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  p.erase(std::unique(p.begin(), p.end(), [](Point2d a, Point2d b) { return a.x == b.x && a.y == b.y; }),
          p.end());
  if (p.size() < 3) return p;
  std::vector<Point2d> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i - 1]) <= 0) --k;
    h[k++] = p[i - 1];
  }
  h.resize(k - 1);
  return h;
}

std::vector<Point2d> trace_outer_contour(const BinaryMask& mask, int sx, int sy) {
  static constexpr int DX[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  static constexpr int DY[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  auto set = [&](int x, int y) { return x >= 0 && y >= 0 && x < mask.width && y < mask.height && mask.at(x, y); };
  std::vector<Point2d> out{{static_cast<double>(sx), static_cast<double>(sy)}};
  int cx = sx, cy = sy, d = 6, first_dir = -1;
  const std::size_t limit = 4 * static_cast<std::size_t>(mask.width) * mask.height + 8;
  while (out.size() < limit) {
    const int start = (d % 2 == 0) ? (d + 6) % 8 : (d + 5) % 8;
    int found = -1;
    for (int k = 0; k < 8; ++k) {
      const int dir = (start + k) % 8;
      if (set(cx + DX[dir], cy + DY[dir])) {
        found = dir;
        break;
      }
    }
    if (found < 0) break;
    if (cx == sx && cy == sy) {
      if (first_dir < 0)
        first_dir = found;
      else if (found == first_dir)
        break;
    }
    cx += DX[found];
    cy += DY[found];
    d = found;
    out.push_back({static_cast<double>(cx), static_cast<double>(cy)});
  }
  // The walk ends on the start pixel; drop the duplicate.
  if (out.size() > 1 && out.back().x == sx && out.back().y == sy) out.pop_back();
  return out;
}

std::vector<Point2d> approximate_polygon(const std::vector<Point2d>& contour, double tolerance) {
  if (contour.size() < 3) throw ConfigError("polygon approximation needs at least 3 contour points");
  const std::size_t n = contour.size();
  std::size_t far = 0;
  double best = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = dist(contour[0], contour[i]);
    if (d > best) {
      best = d;
      far = i;
    }
  }
  std::vector<char> keep(n, 0);
  keep[0] = keep[far] = 1;
  dp_chain(contour, 0, far, tolerance, keep);
  dp_chain(contour, far, n, tolerance, keep);
  std::vector<Point2d> poly;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) poly.push_back(contour[i]);
  return poly;
}

BinaryMask rasterize_polygon(const std::vector<Point2d>& poly, int width, int height) {
  BinaryMask m(width, height);
  const std::size_t n = poly.size();
  if (n == 0) return m;
  std::vector<double> xs;
  for (int y = 0; y < height; ++y) {
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2d a = poly[i], b = poly[(i + 1) % n];
      if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y))
        xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const int xa = std::max(0, static_cast<int>(std::ceil(xs[i] - 1e-9)));
      const int xb = std::min(width - 1, static_cast<int>(std::floor(xs[i + 1] + 1e-9)));
      for (int x = xa; x <= xb; ++x) m.at(x, y) = 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point2d a = poly[i], b = poly[(i + 1) % n];
    const int steps = static_cast<int>(std::ceil(std::max(std::abs(b.x - a.x), std::abs(b.y - a.y)))) + 1;
    for (int s = 0; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      const int x = static_cast<int>(std::lround(a.x + t * (b.x - a.x)));
      const int y = static_cast<int>(std::lround(a.y + t * (b.y - a.y)));
      if (x >= 0 && y >= 0 && x < width && y < height) m.at(x, y) = 1;
    }
  }
  return m;
}

BinaryMask rasterize_circle(const Circle& c, int width, int height) {
  BinaryMask m(width, height);
  const double r2 = c.radius * c.radius;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double dx = x - c.center.x, dy = y - c.center.y;
      if (dx * dx + dy * dy <= r2 + 1e-9) m.at(x, y) = 1;
    }
  return m;
}

}  // namespace arenatrack

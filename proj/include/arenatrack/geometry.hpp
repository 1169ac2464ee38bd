#pragma once

#include <vector>

#include "arenatrack/frame.hpp"

namespace arenatrack {

struct Circle {
  Point2d center;
  double radius = 0.0;
};

struct Ellipse {
  Point2d center;
  double major_r = 0.0;  // semi-axes, major_r >= minor_r
  double minor_r = 0.0;
  double angle = 0.0;    // radians, major axis direction
  double area() const;
};

// Smallest circle containing every point (Welzl, expected linear time).
Circle min_enclosing_circle(std::vector<Point2d> points);

// Ellipse with the same second moments as a set of unit pixels.
// sxx, syy, sxy are central moments divided by the pixel count.
Ellipse ellipse_from_moments(Point2d centroid, double sxx, double syy, double sxy);

std::vector<Point2d> convex_hull(std::vector<Point2d> points);

// Outer boundary of the component containing (sx, sy), clockwise pixel centers.
// (sx, sy) must be the first set pixel of the component in raster order.
std::vector<Point2d> trace_outer_contour(const BinaryMask& mask, int sx, int sy);

// Douglas-Peucker on a closed contour. Throws ConfigError for fewer than 3 points.
std::vector<Point2d> approximate_polygon(const std::vector<Point2d>& contour, double tolerance);

// Pixels whose centers are inside or on the boundary of the polygon.
BinaryMask rasterize_polygon(const std::vector<Point2d>& polygon, int width, int height);

BinaryMask rasterize_circle(const Circle& c, int width, int height);

}  // namespace arenatrack

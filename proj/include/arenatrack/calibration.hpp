#pragma once

#include <array>
#include <optional>
#include <string>

#include "arenatrack/frame.hpp"
#include "arenatrack/kernels.hpp"

namespace arenatrack {

struct DistortionCoefficients {
  double k1 = 0, k2 = 0, k3 = 0, k4 = 0, k5 = 0, k6 = 0;
  double p1 = 0, p2 = 0;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;

  bool is_zero() const;
  // Zero the coefficients not used by a cal.dist model (0..3).
  DistortionCoefficients restricted_to(int model) const;
};

using Mat3 = std::array<std::array<double, 3>, 3>;

struct CameraModel {
  Mat3 camera_matrix{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  Mat3 rotation{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  std::array<double, 3> translation{0, 0, 0};
  DistortionCoefficients distortion;
  std::string unit_name = "mm";

  double fx() const { return camera_matrix[0][0]; }
  double fy() const { return camera_matrix[1][1]; }
  double cx() const { return camera_matrix[0][2]; }
  double cy() const { return camera_matrix[1][2]; }

  // Scale-only model: fx pixels per unit horizontally, fy vertically.
  static CameraModel manual(double fx, double fy, double cx = 0.0, double cy = 0.0);
  void validate() const;
};

Point2d distort_point(Point2d p, const DistortionCoefficients& d);

struct UndistortResult {
  Point2d point;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};
UndistortResult undistort_point_checked(Point2d p, const DistortionCoefficients& d, double tol = 1e-12);
// Throws ProcessingError with the residual when the iteration does not converge.
Point2d undistort_point(Point2d p, const DistortionCoefficients& d, double tol = 1e-12);

Point2d pixel_to_normalized(Point2d px, const CameraModel& m);
Point2d normalized_to_pixel(Point2d n, const CameraModel& m);

using UndistortionMap = kernels::RemapTable;
UndistortionMap build_undistortion_map(const CameraModel& m, int width, int height);
bool is_identity_map(const CameraModel& m);
// Undistorted frame; invalid sources become 255.
Frame undistort_frame(const Frame& raw, const UndistortionMap& map);

Point2d pixel_to_world(Point2d px, const CameraModel& m);
Point2d world_to_pixel(Point2d w, const CameraModel& m);

CameraModel load_calibrator(const std::string& path);
CameraModel parse_calibrator(const std::string& text, const std::string& origin = "calibrator");
void save_calibrator(const CameraModel& m, const std::string& path);
std::string format_calibrator(const CameraModel& m);

}  // namespace arenatrack

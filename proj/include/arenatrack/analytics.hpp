#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "arenatrack/calibration.hpp"
#include "arenatrack/config.hpp"
#include "arenatrack/frame.hpp"

namespace arenatrack {

enum class PointLabel { Predicted = 0, Confirmed = 1, Occluded = 2, Mirror = 3 };

// One row of a Tracking file: undistorted full-frame pixels.
struct TrackingRow {
  std::int64_t frame = 0;
  int arena = 0;  // 0-based
  int track = 0;
  Point2d pixel;
  int label = 1;
};

struct TrajectoryPoint {
  std::int64_t frame = 0;
  double time = 0;
  Point2d pos;  // calibration units
  int label = 1;
};
// Points of one track, sorted by frame.
using Trajectory = std::vector<TrajectoryPoint>;

Trajectory to_real_space(const std::vector<TrackingRow>& rows, const CameraModel& m, double fps);

// Linear interpolation of gaps up to intf frames (label 2), then optional
// centered 5-sample moving average.
Trajectory postprocess(const Trajectory& t, bool interpolate, int intf, bool smooth, double fps);

struct RateSample {
  std::int64_t frame = 0;
  double time = 0;
  double value = 0;
};
std::vector<RateSample> instantaneous_speed(const Trajectory& t, int c);
std::vector<RateSample> instantaneous_accel(const std::vector<RateSample>& speeds, int c);

// World-space arena corners.
struct ArenaCorners {
  Point2d nw, ne, sw, se;
  Point2d center() const;
  double width() const;   // W wall to E wall
  double height() const;  // N wall to S wall
};
ArenaCorners arena_corners(const Rect& rect, const CameraModel& m);

// Distance from p to the line through a and b.
double line_distance(Point2d p, Point2d a, Point2d b);
// k with k*dst < d <= (k+1)*dst, clamped to [0, nzon-1].
int zone_index(double d, double dst, int nzon);

struct ZoneCounts {
  std::vector<std::int64_t> counts;
  std::int64_t total() const;
};

struct EdgeZones {
  ZoneCounts n, w, s, e, all;
};
EdgeZones edge_zones(const std::vector<Point2d>& pts, const ArenaCorners& a, double dst, int nzon);
ZoneCounts radial_zones(const std::vector<Point2d>& pts, Point2d anchor, double dst, int nzon);
Point2d mean_position(const std::vector<Point2d>& pts);

struct ExplorationGrid {
  int rows = 0;  // by distance to the N wall
  int cols = 0;  // by distance to the W wall
  double origin_n = 0, origin_w = 0;  // wall distance of cell (0, 0)
  std::vector<std::int64_t> counts;   // row-major
  std::int64_t at(int r, int c) const { return counts[static_cast<std::size_t>(r) * cols + c]; }
  std::int64_t explored() const;
  std::int64_t number_of_areas() const { return static_cast<std::int64_t>(rows) * cols; }
  std::int64_t total() const;
};
// normalize restricts the grid to the extent of the points.
ExplorationGrid exploration_grid(const std::vector<Point2d>& pts, const ArenaCorners& a, double dst, bool normalize);

struct TransitionEvent {
  std::int64_t frame = 0;
  double time = 0;
  Point2d pos;
  int label = 0;  // 1 appears, 0 disappears
};
std::vector<TransitionEvent> detect_transitions(const Trajectory& t, double ttim, double video_start,
                                                double video_end);

struct FrozenEvent {
  std::int64_t frame = 0;
  double time = 0;
  Point2d mean;
  double duration = 0;
};
std::vector<FrozenEvent> detect_frozen_events(const Trajectory& t, double fmmt, double ftim);

struct StatsSummary {
  std::optional<double> av_speed, av_accel, mobility_rate;
  std::int64_t visible_frames = 0, invisible_frames = 0;
  double visible_time = 0, invisible_time = 0;
  std::optional<std::int64_t> first_visible, last_visible;
  std::optional<double> visibility_rate, invisibility_rate;
  std::int64_t explored_areas = 0, number_of_areas = 0;
  std::optional<double> exploration_rate;
  double total_distance = 0;
  int transitions_to_white = 0, transitions_to_black = 0;
  int frozen_count = 0;
  double total_time_frozen = 0;
  std::optional<double> average_time_frozen;
};

StatsSummary compute_stats(const Trajectory& t, const std::vector<RateSample>& speeds,
                           const std::vector<RateSample>& accels, const ExplorationGrid& grid,
                           const std::vector<TransitionEvent>& transitions, const std::vector<FrozenEvent>& frozen,
                           std::int64_t analyzed_frames, double fps, double mobs);

// Per-arena placement in the population's virtual arena.
struct VirtualPlacement {
  bool flip_x = false;
  bool flip_y = false;
  bool normalized = false;
  Point2d min, max;  // local extent used when normalized
};
// Mirror flags for an arena whose rect center lies at (cx, cy) in a w x h frame.
VirtualPlacement mirror_placement(int aror, double cx, double cy, int frame_width, int frame_height);
// Local coordinates (distance to W wall, distance to N wall) mapped into a
// virtual arena of the given size.
Point2d project_to_virtual(Point2d world, const ArenaCorners& a, const VirtualPlacement& v, double vw, double vh);

}  // namespace arenatrack

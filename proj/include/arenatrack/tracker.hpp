#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "arenatrack/detection.hpp"
#include "arenatrack/features.hpp"
#include "arenatrack/kalman.hpp"

namespace arenatrack {

struct TrackerParams {
  KalmanParams kalman;
  double disf = 50;
  double sich = 0.4;
  int dund = 1;
  int dage = 10;
  int dmax = 8;
  int ntra = 1;
  double advr = 0.8;
  double advm = 10;
  int cnft = 20;
  int tfmi = 5, tfma = 10, tdma = 10;
  double acor = 0.6, bcor = 0.5;
  int mins = 50;
  int feature_cap = 500;

  void validate() const;
};

enum class TrackStatus { Active, Inactive, Conflicted, Deleted };

struct TrackPoint {
  std::int64_t frame = 0;
  Point2d pos;
  std::int64_t size = 0;
};

struct Track {
  int id = 0;
  KalmanFilter kf;
  std::vector<TrackPoint> points;
  TrackStatus status = TrackStatus::Active;
  int unassigned_streak = 0;
  bool is_short = true;
  FeatureStore features;
  std::int64_t closed_frame = -1;
  Point2d predicted;

  std::int64_t first_frame() const { return points.front().frame; }
  std::int64_t last_frame() const { return points.back().frame; }
  std::size_t length() const { return points.size(); }
};

// A detection with its features, when identity is in use.
struct TrackInput {
  DetectionRecord det;
  std::optional<BodyFeatures> features;
};

// Relative size change against the last accepted size.
double size_change(double new_size, double last_size);
bool acceptance_check(const Track& t, Point2d predicted, const DetectionRecord& d, std::int64_t frame,
                      const TrackerParams& p);
bool collision_margin_conflicts(double dist_i, double dist_k, const TrackerParams& p);

struct FusionScore {
  double mean = 0.0;
  double best = 0.0;
  bool any = false;
};
FusionScore fusion_correlation(const FeatureStore& active, const FeatureStore& candidate);
bool fusion_allowed(const Track& active, const Track& candidate, const TrackerParams& p);

struct StepReport {
  int assigned = 0;
  int rejected = 0;
  int conflicted = 0;
  int spawned = 0;
  int fused = 0;
  int active = 0;
};

class Tracker {
 public:
  explicit Tracker(const TrackerParams& p) : p_(p) {}

  StepReport step(std::int64_t frame, std::vector<TrackInput> inputs);
  // Close every open track (end of sequence).
  void finish(std::int64_t frame);

  const std::vector<Track>& tracks() const { return tracks_; }
  std::vector<Track>& tracks() { return tracks_; }
  std::size_t live_tracks() const { return tracks_.size(); }
  int max_simultaneous_active() const { return max_active_; }
  const TrackerParams& params() const { return p_; }

 private:
  void close(Track& t, std::int64_t frame);
  void remove_deleted();

  TrackerParams p_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
  int max_active_ = 0;
};

}  // namespace arenatrack

#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arenatrack/frame_source.hpp"
#include "arenatrack/outputs.hpp"
#include "arenatrack/project.hpp"

namespace arenatrack {

// A run interrupted at a safe point; no output is kept.
class StoppedError : public std::runtime_error {
 public:
  StoppedError() : std::runtime_error("run stopped") {}
};

struct Progress {
  std::string stage;  // tracking, identity, analytics, writing
  int sequence = 0;   // 1-based
  double percent = 0;
};
using ProgressFn = std::function<void(const Progress&)>;

struct RunOptions {
  std::optional<double> start_min, end_min;
  std::optional<int> threads;
  bool no_identity = false;
  std::optional<int> out_level;  // overrides out.ftxt
  std::string out_root;          // default: the project directory
  ProgressFn progress;
  const std::atomic<bool>* stop = nullptr;
};

struct RunSummary {
  std::string output_dir;
  std::int64_t frames = 0;
  double tracking_seconds = 0;
  int tracks = 0;
  std::vector<std::string> warnings;
  std::vector<SequenceTracks> sequences;
};

// Precedence: explicit value, then ARENATRACK_THREADS, then exe.thre.
int effective_threads(const Config& c, std::optional<int> requested);

struct PipelineParams {
  GmmParams gmm;
  DetectionParams det;
  TrackerParams tracker;
  FeatureParams features;
  IdentityParams identity;
  bool run_identity = false;
  bool extract_features = false;
  int idff = 500;
  int gfil = 5;
  bool normalize = false;
};
PipelineParams pipeline_params(const Config& c, bool no_identity);

// Arenas of a sequence from its undistorted reference frame, honoring
// roi.mode and the project's rectangles and names.
std::vector<Arena> sequence_arenas(const Frame& reference, const Project& pr, std::vector<std::string>* warnings);

// Frame-by-frame tracking over a fixed set of arenas.
class SequenceTracker {
 public:
  SequenceTracker(std::vector<Arena> arenas, const PipelineParams& p, const CameraModel& camera, int width,
                  int height, int threads);
  ~SequenceTracker();

  // raw is a distorted source frame; its index is the frame number.
  void process(const Frame& raw);
  // Closes all tracks, runs identification and returns rows per arena,
  // sorted by (track, frame), with coordinates at file precision.
  std::vector<std::vector<TrackingRow>> finish(std::vector<std::string>* diagnostics);

  const std::vector<Arena>& arenas() const { return arenas_; }
  const Frame& undistorted() const { return undistorted_; }
  // Last positions of the open tracks in each arena, for frame dumps.
  std::vector<std::vector<std::vector<Point2d>>> recent_paths(int length) const;

 private:
  struct ArenaState;
  std::vector<Arena> arenas_;
  PipelineParams p_;
  UndistortionMap map_;
  bool identity_map_ = true;
  int threads_ = 1;
  std::int64_t last_frame_ = -1;
  Frame undistorted_;
  std::vector<std::unique_ptr<ArenaState>> states_;
};

std::unique_ptr<ConcatSource> open_sequence(const SequenceInput& s, double default_fps);

// Tracking, identification, analytics and output writing.
RunSummary run_project(const Project& pr, const RunOptions& o);
// Analytics and images recomputed from an existing output folder's Tracking files.
RunSummary render_project(const Project& pr, const RunOptions& o);

struct Throughput {
  std::int64_t frames = 0;
  double seconds = 0;
  double fps() const { return seconds > 0 ? static_cast<double>(frames) / seconds : 0; }
};
// Times the per-frame pipeline (undistortion through tracking) on frames
// already in memory.
Throughput measure_throughput(const std::vector<Frame>& frames, const std::vector<Arena>& arenas,
                              const PipelineParams& p, const CameraModel& camera, int threads);

}  // namespace arenatrack

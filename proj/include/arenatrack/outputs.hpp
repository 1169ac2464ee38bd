#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arenatrack/analytics.hpp"
#include "arenatrack/project.hpp"
#include "arenatrack/render.hpp"

namespace arenatrack {

struct ArenaInfo {
  std::string name;
  Rect rect;
};

// Tracking artifacts of one sequence; everything else is derived from these.
struct SequenceTracks {
  int index = 0;                   // 0-based
  std::vector<std::string> files;  // input files
  OutputSequence meta;
  std::vector<ArenaInfo> arenas;
  std::vector<std::vector<TrackingRow>> rows;  // per arena, sorted by (track, frame)
  Frame reference;                             // undistorted reference frame
};

struct TrackAnalysis {
  int track = 0;
  Trajectory points;  // postprocessed, calibration units
  std::vector<RateSample> speed, accel;
  ExplorationGrid grid;
  std::vector<TransitionEvent> transitions;
  std::vector<FrozenEvent> frozen;
  StatsSummary stats;
};

// One arena, or the population's virtual arena.
struct RegionAnalysis {
  ArenaCorners corners;
  std::vector<TrackAnalysis> tracks;
  EdgeZones edges;
  ZoneCounts mean_zones, center_zones;
  ExplorationGrid grid;
  Point2d mean, center;
};

// Rows grouped by track column and converted to postprocessed trajectories.
std::map<int, Trajectory> track_trajectories(const std::vector<TrackingRow>& rows, const CameraModel& m,
                                             const AnalyticsParams& p, double fps);

TrackAnalysis analyze_track(int track, Trajectory points, const ArenaCorners& c, const AnalyticsParams& p,
                            double fps, std::int64_t first_frame, std::int64_t end_frame);
RegionAnalysis analyze_region(const std::map<int, Trajectory>& tracks, const ArenaCorners& c,
                              const AnalyticsParams& p, double fps, std::int64_t first_frame,
                              std::int64_t end_frame);

// Population: every arena's tracks projected into a common virtual arena.
struct PopulationTrack {
  int sequence = 0;       // 0-based
  int arena = 0;          // global 1-based arena number
  int track = 0;
  TrackAnalysis analysis;  // in virtual coordinates
};
struct Population {
  double width = 0, height = 0;  // virtual arena size
  std::vector<PopulationTrack> tracks;
  RegionAnalysis region;
};
Population build_population(const std::vector<SequenceTracks>& seqs, const CameraModel& m, const AnalyticsParams& p);

// Text formats; unit is the calibration unit name.
std::string format_realspace(const std::vector<std::pair<int, const TrackAnalysis*>>& tracks, const std::string& unit);
std::string format_speed(const std::vector<std::pair<int, const TrackAnalysis*>>& tracks, const std::string& unit);
std::string format_accel(const std::vector<std::pair<int, const TrackAnalysis*>>& tracks, const std::string& unit);
std::string format_edge_table(const EdgeZones& z, double dst, double fps, const std::string& unit);
std::string format_radial_table(const ZoneCounts& z, double dst, double fps, const std::string& unit);
std::string format_exploration_table(const ExplorationGrid& g, double dst, double fps, const std::string& unit);

struct EventRow {
  int sequence = 0, arena = 0, track = 0;
  const TrackAnalysis* analysis = nullptr;
};
std::string format_transitions(const std::vector<EventRow>& rows, const std::string& unit);
std::string format_frozen(const std::vector<EventRow>& rows, const std::string& unit);

// Stats field list in file order; integer fields print without exponent.
struct StatField {
  const char* name;
  std::optional<double> value;
  bool integer = false;
};
std::vector<StatField> stat_fields(const StatsSummary& s);

struct StatsHeader {
  int width = 0, height = 0;
  double fps = 25;
  std::int64_t analyzed_frames = 0;
  int arena = 0;  // 1-based
  std::string name;
  Rect rect;
};
std::string format_stats(const StatsHeader& h, const RegionAnalysis& r, const CameraModel& m);
std::string format_population_stats(const Population& pop, const StatsHeader& h);

struct OutputOptions {
  int ftxt = 1;  // 0 tracking + project files, 1 + real space, stats, CSV, 2 all
  int fjpg = 1;  // >= 1 spatial images
  int fimg = 0;  // 0 PNG, 1 JPEG
};
OutputOptions output_options(const Config& c);

// Writes the complete result tree for the project into dir.
void write_results(const Project& pr, const std::vector<SequenceTracks>& seqs, const std::string& dir,
                   const OutputOptions& o);

std::string image_path(const std::string& stem, int fimg);

// Output folder <root>/<name> built in <root>/.<name>.staging and swapped in
// on commit; discarded otherwise.
class OutputStage {
 public:
  OutputStage(const std::string& root, const std::string& name);
  ~OutputStage();
  OutputStage(const OutputStage&) = delete;
  OutputStage& operator=(const OutputStage&) = delete;

  const std::string& dir() const { return staging_; }
  const std::string& final_dir() const { return final_; }
  void commit();

 private:
  std::string name_, staging_, final_;
  bool committed_ = false;
};

}  // namespace arenatrack

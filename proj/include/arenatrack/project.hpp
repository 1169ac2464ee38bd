#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arenatrack/analytics.hpp"
#include "arenatrack/calibration.hpp"
#include "arenatrack/config.hpp"
#include "arenatrack/frame.hpp"

namespace arenatrack {

struct SequenceInput {
  std::vector<std::string> files;  // as written
  int ref_video = 0;               // file index of the reference frame
  std::int64_t ref_frame = 0;      // frame within that file
};

std::vector<SequenceInput> parse_input(const std::string& text, const std::string& origin = "input");
std::string format_input(const std::vector<SequenceInput>& seqs);

struct ProjectPaths {
  std::string input, configuration, arena, arena_names, calibrator;
};
ProjectPaths parse_tox(const std::string& text, const std::string& origin);
std::string format_tox(const ProjectPaths& p);

struct Project {
  std::string tox_path;
  std::string base_dir;  // directory of the .tox file
  ProjectPaths paths;    // resolved
  std::vector<SequenceInput> sequences;  // file paths resolved
  std::vector<SequenceInput> sequences_as_written;
  Config config = default_config();
  ParamSet colors = default_colors();
  CameraModel camera;
  bool has_calibrator = false;
  std::vector<Rect> arena_rects;
  std::vector<std::string> arena_names;

  std::string name() const { return config.text("out.pnam"); }
};

// Missing Arena, ArenaNames and Calibrator files are allowed; the others are not.
Project load_project(const std::string& tox_path);

// Writes <dir>/<pname>.tox with pname_Input.txt, pname_Configuration.txt and,
// when a camera is given, pname_Calibrator.txt. Returns the .tox path.
std::string write_project(const std::string& dir, const Config& config, const std::vector<SequenceInput>& seqs,
                          const CameraModel* camera);

// Resolves p against base unless it is absolute.
std::string resolve_path(const std::string& base, const std::string& p);

// Tracking file (frame, 0-based arena, track, x, y, label).
std::string format_tracking(const std::vector<TrackingRow>& rows);
std::vector<TrackingRow> parse_tracking(const std::string& text, const std::string& origin);

struct OutputSequence {
  std::int64_t first_frame = 0, end_frame = 0;  // analysis window [first, end)
  double fps = 25;
  int width = 0, height = 0;
  std::vector<std::string> tracking_files;  // relative to the output folder
};
std::string format_output_index(const std::vector<OutputSequence>& seqs);
std::vector<OutputSequence> parse_output_index(const std::string& text, const std::string& origin);

}  // namespace arenatrack

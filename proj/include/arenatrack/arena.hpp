#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arenatrack/frame.hpp"
#include "arenatrack/geometry.hpp"

namespace arenatrack {

struct ArenaParams {
  int thre = 150;
  double poly = 1.0;
  int elms = 7;
  int dilt = 1;
  int erot = 4;
  std::int64_t mins = 100000;
  bool fite = false;
  double redr = 1.0;
};

struct TrackingArea {
  std::vector<Point2d> polygon;  // frame coordinates; empty when circular
  std::optional<Circle> circle;  // frame coordinates
  BinaryMask mask;               // over the arena rect
};

struct Arena {
  int id = 0;
  std::string name;
  Rect rect;         // bounding box of the tracking area
  Rect source_rect;  // user rectangle (manual) or rect (automatic)
  TrackingArea area;
};

std::vector<Arena> define_arenas_automatic(const Frame& reference, const ArenaParams& p);

struct ManualArenaOutcome {
  std::optional<Arena> arena;
  std::string error;
};
std::vector<ManualArenaOutcome> define_arenas_manual(const Frame& reference, const std::vector<Rect>& rects,
                                                     const std::vector<std::string>& names, const ArenaParams& p);

std::string default_arena_name(int index);

// pname_Arena.txt: count, then "x0 y0 x1 y1" (x1, y1 exclusive).
std::vector<Rect> load_arena_rects(const std::string& path);
void save_arena_rects(const std::vector<Rect>& rects, const std::string& path);
// pname_ArenaNames.txt: count, then one name per line.
std::vector<std::string> load_arena_names(const std::string& path);
void save_arena_names(const std::vector<std::string>& names, const std::string& path);

}  // namespace arenatrack

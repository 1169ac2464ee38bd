#pragma once

#include <array>
#include <functional>
#include <vector>

#include "arenatrack/config.hpp"
#include "arenatrack/frame.hpp"

namespace arenatrack {

using Rgb = std::array<std::uint8_t, 3>;

// Blue -> green -> yellow -> red over [0, 1].
Rgb color_scale(double v);

// Zone index per pixel (-1 = not part of any zone), row-major over the backdrop.
struct ZoneMap {
  int width = 0, height = 0;
  std::vector<int> zone;
};

// Builds a zone map by evaluating zone_of(x, y) at every pixel.
ZoneMap make_zone_map(int width, int height, const std::function<int(int, int)>& zone_of);

// Cells colored by frequency / max frequency, blended 50% over the backdrop,
// boundaries stroked with the zone line color.
RgbImage render_heatmap(const RgbImage& backdrop, const ZoneMap& zones, const std::vector<double>& frequency,
                        const RenderParams& p);

struct PixelTrack {
  int track = 0;
  std::vector<std::pair<std::int64_t, Point2d>> points;  // frame, backdrop pixel
};
Rgb track_color(int index);
RgbImage render_trajectories(const RgbImage& backdrop, const std::vector<PixelTrack>& tracks, const RenderParams& p);

// Line with a square brush of the given width.
void draw_line(RgbImage& img, Point2d a, Point2d b, Rgb color, int width);

}  // namespace arenatrack

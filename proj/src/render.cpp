#include "arenatrack/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace arenatrack {

namespace {

constexpr std::int64_t kMaxJoinGap = 25;

void plot(RgbImage& img, int x, int y, Rgb c, int width) {
  const int lo = -(width - 1) / 2, hi = width / 2;
  for (int dy = lo; dy <= hi; ++dy)
    for (int dx = lo; dx <= hi; ++dx) {
      const int px = x + dx, py = y + dy;
      if (px < 0 || py < 0 || px >= img.width || py >= img.height) continue;
      std::uint8_t* d = img.px(px, py);
      d[0] = c[0];
      d[1] = c[1];
      d[2] = c[2];
    }
}

}  // namespace

Rgb color_scale(double v) {
  v = std::clamp(v, 0.0, 1.0);
  const Rgb stops[4] = {{0, 0, 255}, {0, 255, 0}, {255, 255, 0}, {255, 0, 0}};
  const double s = v * 3.0;
  const int k = std::min(2, static_cast<int>(std::floor(s)));
  const double u = s - k;
  Rgb out;
  for (int i = 0; i < 3; ++i)
    out[i] = static_cast<std::uint8_t>(std::lround(stops[k][i] + u * (stops[k + 1][i] - stops[k][i])));
  return out;
}

ZoneMap make_zone_map(int width, int height, const std::function<int(int, int)>& zone_of) {
  ZoneMap m;
  m.width = width;
  m.height = height;
  m.zone.resize(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) m.zone[static_cast<std::size_t>(y) * width + x] = zone_of(x, y);
  return m;
}

RgbImage render_heatmap(const RgbImage& backdrop, const ZoneMap& zones, const std::vector<double>& frequency,
                        const RenderParams& p) {
  RgbImage out = backdrop;
  double maxf = 0;
  for (double f : frequency) maxf = std::max(maxf, f);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) {
      const int z = zones.zone[static_cast<std::size_t>(y) * zones.width + x];
      if (z < 0 || z >= static_cast<int>(frequency.size()) || frequency[z] <= 0 || maxf <= 0) continue;
      const Rgb c = color_scale(frequency[z] / maxf);
      std::uint8_t* d = out.px(x, y);
      for (int i = 0; i < 3; ++i) d[i] = static_cast<std::uint8_t>((d[i] + c[i] + 1) / 2);
    }
  if (p.zone_width > 0) {
    const Rgb line{static_cast<std::uint8_t>(p.zone_rgb[0]), static_cast<std::uint8_t>(p.zone_rgb[1]),
                   static_cast<std::uint8_t>(p.zone_rgb[2])};
    for (int y = 0; y < out.height; ++y)
      for (int x = 0; x < out.width; ++x) {
        const int z = zones.zone[static_cast<std::size_t>(y) * zones.width + x];
        if (z < 0) continue;
        const bool right = x + 1 < zones.width && zones.zone[static_cast<std::size_t>(y) * zones.width + x + 1] != z &&
                           zones.zone[static_cast<std::size_t>(y) * zones.width + x + 1] >= 0;
        const bool down = y + 1 < zones.height &&
                          zones.zone[static_cast<std::size_t>(y + 1) * zones.width + x] != z &&
                          zones.zone[static_cast<std::size_t>(y + 1) * zones.width + x] >= 0;
        if (right || down) plot(out, x, y, line, p.zone_width);
      }
  }
  return out;
}

Rgb track_color(int index) {
  static const Rgb palette[] = {{230, 25, 75},  {60, 180, 75},  {0, 130, 200},  {245, 130, 48},
                                {145, 30, 180}, {70, 240, 240}, {240, 50, 230}, {128, 128, 0}};
  return palette[static_cast<std::size_t>(index) % (sizeof palette / sizeof palette[0])];
}

void draw_line(RgbImage& img, Point2d a, Point2d b, Rgb color, int width) {
  int x0 = static_cast<int>(std::lround(a.x)), y0 = static_cast<int>(std::lround(a.y));
  const int x1 = static_cast<int>(std::lround(b.x)), y1 = static_cast<int>(std::lround(b.y));
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    plot(img, x0, y0, color, width);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

RgbImage render_trajectories(const RgbImage& backdrop, const std::vector<PixelTrack>& tracks,
                             const RenderParams& p) {
  RgbImage out = backdrop;
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    const Rgb c = track_color(static_cast<int>(t));
    const auto& pts = tracks[t].points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i > 0 && pts[i].first - pts[i - 1].first <= kMaxJoinGap)
        draw_line(out, pts[i - 1].second, pts[i].second, c, p.trajectory_width);
      else
        draw_line(out, pts[i].second, pts[i].second, c, p.trajectory_width);
    }
  }
  return out;
}

}  // namespace arenatrack

#include "arenatrack/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace arenatrack {

namespace {

double dist(Point2d a, Point2d b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

Trajectory to_real_space(const std::vector<TrackingRow>& rows, const CameraModel& m, double fps) {
  Trajectory out;
  out.reserve(rows.size());
  for (const auto& r : rows)
    out.push_back({r.frame, static_cast<double>(r.frame) / fps, pixel_to_world(r.pixel, m), r.label});
  std::stable_sort(out.begin(), out.end(),
                   [](const TrajectoryPoint& a, const TrajectoryPoint& b) { return a.frame < b.frame; });
  return out;
}

Trajectory postprocess(const Trajectory& t, bool interpolate, int intf, bool smooth, double fps) {
  Trajectory out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (interpolate && i > 0) {
      const TrajectoryPoint& a = t[i - 1];
      const TrajectoryPoint& b = t[i];
      const std::int64_t gap = b.frame - a.frame - 1;
      if (gap > 0 && gap <= intf) {
        for (std::int64_t k = 1; k <= gap; ++k) {
          const double u = static_cast<double>(k) / static_cast<double>(gap + 1);
          TrajectoryPoint p;
          p.frame = a.frame + k;
          p.time = static_cast<double>(p.frame) / fps;
          p.pos = {a.pos.x + u * (b.pos.x - a.pos.x), a.pos.y + u * (b.pos.y - a.pos.y)};
          p.label = static_cast<int>(PointLabel::Occluded);
          out.push_back(p);
        }
      }
    }
    out.push_back(t[i]);
  }
  if (smooth && out.size() >= 3) {
    Trajectory sm = out;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - 2), hi = std::min(n - 1, i + 2);
      double sx = 0, sy = 0;
      for (std::ptrdiff_t k = lo; k <= hi; ++k) {
        sx += out[k].pos.x;
        sy += out[k].pos.y;
      }
      const double c = static_cast<double>(hi - lo + 1);
      sm[i].pos = {sx / c, sy / c};
    }
    out = std::move(sm);
  }
  return out;
}

std::vector<RateSample> instantaneous_speed(const Trajectory& t, int c) {
  std::vector<RateSample> out;
  const std::size_t uc = static_cast<std::size_t>(c);
  for (std::size_t i = uc; i + uc < t.size(); ++i) {
    const double dt = t[i + uc].time - t[i - uc].time;
    if (dt <= 0) continue;
    out.push_back({t[i].frame, t[i].time, dist(t[i + uc].pos, t[i - uc].pos) / dt});
  }
  return out;
}

std::vector<RateSample> instantaneous_accel(const std::vector<RateSample>& s, int c) {
  std::vector<RateSample> out;
  const std::size_t uc = static_cast<std::size_t>(c);
  for (std::size_t i = uc; i + uc < s.size(); ++i) {
    const double dt = s[i + uc].time - s[i - uc].time;
    if (dt <= 0) continue;
    out.push_back({s[i].frame, s[i].time, std::abs(s[i + uc].value - s[i - uc].value) / dt});
  }
  return out;
}

Point2d ArenaCorners::center() const {
  return {(nw.x + ne.x + sw.x + se.x) / 4.0, (nw.y + ne.y + sw.y + se.y) / 4.0};
}
double ArenaCorners::width() const { return line_distance(ne, nw, sw); }
double ArenaCorners::height() const { return line_distance(sw, nw, ne); }

ArenaCorners arena_corners(const Rect& r, const CameraModel& m) {
  const double x0 = r.x0 - 0.5, x1 = r.x1 - 0.5, y0 = r.y0 - 0.5, y1 = r.y1 - 0.5;
  return {pixel_to_world({x0, y0}, m), pixel_to_world({x1, y0}, m), pixel_to_world({x0, y1}, m),
          pixel_to_world({x1, y1}, m)};
}

double line_distance(Point2d p, Point2d a, Point2d b) {
  const double num = std::abs((b.y - a.y) * p.x - (b.x - a.x) * p.y + b.x * a.y - b.y * a.x);
  return num / std::hypot(b.x - a.x, b.y - a.y);
}

int zone_index(double d, double dst, int nzon) {
  const double k = std::ceil(d / dst) - 1.0;
  if (!(k > 0)) return 0;
  return k >= nzon - 1 ? nzon - 1 : static_cast<int>(k);
}

std::int64_t ZoneCounts::total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }

EdgeZones edge_zones(const std::vector<Point2d>& pts, const ArenaCorners& a, double dst, int nzon) {
  EdgeZones z;
  for (ZoneCounts* zc : {&z.n, &z.w, &z.s, &z.e, &z.all}) zc->counts.assign(static_cast<std::size_t>(nzon), 0);
  for (const Point2d& p : pts) {
    const double dn = line_distance(p, a.nw, a.ne);
    const double dw = line_distance(p, a.nw, a.sw);
    const double ds = line_distance(p, a.sw, a.se);
    const double de = line_distance(p, a.se, a.ne);
    ++z.n.counts[zone_index(dn, dst, nzon)];
    ++z.w.counts[zone_index(dw, dst, nzon)];
    ++z.s.counts[zone_index(ds, dst, nzon)];
    ++z.e.counts[zone_index(de, dst, nzon)];
    ++z.all.counts[zone_index(std::min({dn, dw, ds, de}), dst, nzon)];
  }
  return z;
}

ZoneCounts radial_zones(const std::vector<Point2d>& pts, Point2d anchor, double dst, int nzon) {
  ZoneCounts z;
  z.counts.assign(static_cast<std::size_t>(nzon), 0);
  for (const Point2d& p : pts) ++z.counts[zone_index(dist(p, anchor), dst, nzon)];
  return z;
}

Point2d mean_position(const std::vector<Point2d>& pts) {
  if (pts.empty()) return {};
  double sx = 0, sy = 0;
  for (const Point2d& p : pts) {
    sx += p.x;
    sy += p.y;
  }
  return {sx / static_cast<double>(pts.size()), sy / static_cast<double>(pts.size())};
}

std::int64_t ExplorationGrid::explored() const {
  return std::count_if(counts.begin(), counts.end(), [](std::int64_t c) { return c > 0; });
}
std::int64_t ExplorationGrid::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

ExplorationGrid exploration_grid(const std::vector<Point2d>& pts, const ArenaCorners& a, double dst,
                                 bool normalize) {
  ExplorationGrid g;
  std::vector<double> dn(pts.size()), dw(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    dn[i] = line_distance(pts[i], a.nw, a.ne);
    dw[i] = line_distance(pts[i], a.nw, a.sw);
  }
  if (normalize && !pts.empty()) {
    const auto [n0, n1] = std::minmax_element(dn.begin(), dn.end());
    const auto [w0, w1] = std::minmax_element(dw.begin(), dw.end());
    g.origin_n = *n0;
    g.origin_w = *w0;
    g.rows = static_cast<int>(std::floor((*n1 - *n0) / dst)) + 1;
    g.cols = static_cast<int>(std::floor((*w1 - *w0) / dst)) + 1;
  } else {
    g.rows = std::max(1, static_cast<int>(std::ceil(a.height() / dst - 1e-9)));
    g.cols = std::max(1, static_cast<int>(std::ceil(a.width() / dst - 1e-9)));
  }
  g.counts.assign(static_cast<std::size_t>(g.rows) * g.cols, 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int r = std::clamp(static_cast<int>(std::floor((dn[i] - g.origin_n) / dst)), 0, g.rows - 1);
    const int c = std::clamp(static_cast<int>(std::floor((dw[i] - g.origin_w) / dst)), 0, g.cols - 1);
    ++g.counts[static_cast<std::size_t>(r) * g.cols + c];
  }
  return g;
}

std::vector<TransitionEvent> detect_transitions(const Trajectory& t, double ttim, double video_start,
                                                double video_end) {
  std::vector<TransitionEvent> out;
  if (t.empty()) return out;
  if (t.front().time - video_start > ttim) out.push_back({t.front().frame, t.front().time, t.front().pos, 1});
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i].time - t[i - 1].time > ttim) {
      out.push_back({t[i - 1].frame, t[i - 1].time, t[i - 1].pos, 0});
      out.push_back({t[i].frame, t[i].time, t[i].pos, 1});
    }
  }
  if (video_end - t.back().time > ttim) out.push_back({t.back().frame, t.back().time, t.back().pos, 0});
  return out;
}

std::vector<FrozenEvent> detect_frozen_events(const Trajectory& t, double fmmt, double ftim) {
  std::vector<FrozenEvent> out;
  const std::size_t n = t.size();
  std::size_t i = 0;
  while (i < n) {
    double sx = t[i].pos.x, sy = t[i].pos.y;
    double x0 = t[i].pos.x, x1 = x0, y0 = t[i].pos.y, y1 = y0;
    std::size_t j = i;
    for (std::size_t k = i + 1; k < n; ++k) {
      const Point2d p = t[k].pos;
      const double nx0 = std::min(x0, p.x), nx1 = std::max(x1, p.x);
      const double ny0 = std::min(y0, p.y), ny1 = std::max(y1, p.y);
      // Two points 2*fmmt apart cannot both lie within fmmt of the mean.
      if (nx1 - nx0 >= 2 * fmmt || ny1 - ny0 >= 2 * fmmt) break;
      const double cnt = static_cast<double>(k - i + 1);
      const Point2d m{(sx + p.x) / cnt, (sy + p.y) / cnt};
      const double far = std::hypot(std::max(m.x - nx0, nx1 - m.x), std::max(m.y - ny0, ny1 - m.y));
      bool ok = far < fmmt;
      if (!ok) {
        ok = true;
        for (std::size_t q = i; q <= k && ok; ++q) ok = dist(t[q].pos, m) < fmmt;
      }
      if (!ok) break;
      sx += p.x;
      sy += p.y;
      x0 = nx0;
      x1 = nx1;
      y0 = ny0;
      y1 = ny1;
      j = k;
    }
    const double duration = t[j].time - t[i].time;
    if (j > i && duration >= ftim) {
      const double cnt = static_cast<double>(j - i + 1);
      out.push_back({t[i].frame, t[i].time, {sx / cnt, sy / cnt}, duration});
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

StatsSummary compute_stats(const Trajectory& t, const std::vector<RateSample>& speeds,
                           const std::vector<RateSample>& accels, const ExplorationGrid& grid,
                           const std::vector<TransitionEvent>& transitions, const std::vector<FrozenEvent>& frozen,
                           std::int64_t analyzed_frames, double fps, double mobs) {
  StatsSummary s;
  if (!speeds.empty()) {
    double sum = 0;
    std::int64_t mobile = 0;
    for (const auto& v : speeds) {
      sum += v.value;
      if (v.value > mobs) ++mobile;
    }
    s.av_speed = sum / static_cast<double>(speeds.size());
    s.mobility_rate = static_cast<double>(mobile) / static_cast<double>(speeds.size());
  }
  if (!accels.empty()) {
    double sum = 0;
    for (const auto& v : accels) sum += v.value;
    s.av_accel = sum / static_cast<double>(accels.size());
  }
  for (const auto& p : t) {
    if (p.label != static_cast<int>(PointLabel::Confirmed)) continue;
    ++s.visible_frames;
    if (!s.first_visible || p.frame < *s.first_visible) s.first_visible = p.frame;
    if (!s.last_visible || p.frame > *s.last_visible) s.last_visible = p.frame;
  }
  s.invisible_frames = std::max<std::int64_t>(0, analyzed_frames - s.visible_frames);
  s.visible_time = static_cast<double>(s.visible_frames) / fps;
  s.invisible_time = static_cast<double>(s.invisible_frames) / fps;
  const std::int64_t seen = s.visible_frames + s.invisible_frames;
  if (seen > 0) {
    s.visibility_rate = static_cast<double>(s.visible_frames) / static_cast<double>(seen);
    s.invisibility_rate = 1.0 - *s.visibility_rate;
  }
  s.explored_areas = grid.explored();
  s.number_of_areas = grid.number_of_areas();
  if (s.number_of_areas > 0)
    s.exploration_rate = static_cast<double>(s.explored_areas) / static_cast<double>(s.number_of_areas);
  for (std::size_t i = 1; i < t.size(); ++i) s.total_distance += dist(t[i].pos, t[i - 1].pos);
  for (const auto& e : transitions) (e.label == 1 ? s.transitions_to_white : s.transitions_to_black)++;
  s.frozen_count = static_cast<int>(frozen.size());
  for (const auto& f : frozen) s.total_time_frozen += f.duration;
  if (!frozen.empty()) s.average_time_frozen = s.total_time_frozen / static_cast<double>(frozen.size());
  return s;
}

VirtualPlacement mirror_placement(int aror, double cx, double cy, int frame_width, int frame_height) {
  VirtualPlacement v;
  v.flip_x = (aror == 1 || aror == 3) && cx > frame_width / 2.0;
  v.flip_y = (aror == 2 || aror == 3) && cy > frame_height / 2.0;
  return v;
}

Point2d project_to_virtual(Point2d world, const ArenaCorners& a, const VirtualPlacement& v, double vw, double vh) {
  double x = line_distance(world, a.nw, a.sw);
  double y = line_distance(world, a.nw, a.ne);
  double w = a.width(), h = a.height();
  if (v.normalized) {
    const double ex = v.max.x - v.min.x, ey = v.max.y - v.min.y;
    x = ex > 0 ? (x - v.min.x) / ex * vw : vw / 2;
    y = ey > 0 ? (y - v.min.y) / ey * vh : vh / 2;
    w = vw;
    h = vh;
  }
  if (v.flip_x) x = w - x;
  if (v.flip_y) y = h - y;
  return {x, y};
}

}  // namespace arenatrack

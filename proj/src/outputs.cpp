#include "arenatrack/outputs.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "arenatrack/errors.hpp"
#include "arenatrack/image_io.hpp"
#include "arenatrack/text.hpp"

namespace fs = std::filesystem;

namespace arenatrack {

namespace {

std::string num(double v) { return format_number(v); }

std::string field_text(const StatField& f) {
  if (!f.value) return "n/a";
  if (f.integer) return std::to_string(static_cast<long long>(std::llround(*f.value)));
  return format_number(*f.value);
}

std::vector<Point2d> positions(const Trajectory& t) {
  std::vector<Point2d> out;
  out.reserve(t.size());
  for (const auto& p : t) out.push_back(p.pos);
  return out;
}

std::string zone_label(int k, double dst, double origin, const std::string& unit) {
  return num(origin + (k + 1) * dst) + unit;
}

// Frame Count / Time Count / Frequency blocks over rows of counts.
std::string zone_blocks(const std::vector<std::pair<std::string, const ZoneCounts*>>& rows, int ncols,
                        double dst, double fps, const std::string& unit) {
  std::ostringstream os;
  const char* titles[3] = {"Frame Count", "Time Count (sec)", "Frequency (Zone Detections/Total Detections)"};
  for (int b = 0; b < 3; ++b) {
    if (b > 0) os << "\n";
    os << "\t" << titles[b] << "\n";
    for (int k = 0; k < ncols; ++k) os << "\t" << zone_label(k, dst, 0, unit);
    os << "\n";
    for (const auto& [label, z] : rows) {
      os << label;
      const std::int64_t total = z->total();
      for (int k = 0; k < ncols; ++k) {
        const std::int64_t c = z->counts[k];
        os << "\t";
        if (b == 0)
          os << c;
        else if (b == 1)
          os << num(static_cast<double>(c) / fps);
        else
          os << (total > 0 ? num(static_cast<double>(c) / static_cast<double>(total)) : "n/a");
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string pos_header(const std::string& unit) { return "Pos. X (" + unit + ")\tPos. Y (" + unit + ")"; }

std::string point_text(Point2d p) { return "[" + num(p.x) + ", " + num(p.y) + "]"; }

std::int64_t visible_frames(const std::map<int, Trajectory>& tracks) {
  std::set<std::int64_t> frames;
  for (const auto& [id, t] : tracks)
    for (const auto& p : t)
      if (p.label == static_cast<int>(PointLabel::Confirmed)) frames.insert(p.frame);
  return static_cast<std::int64_t>(frames.size());
}

Rgb rgb_of(const std::vector<int>& v) {
  return {static_cast<std::uint8_t>(v[0]), static_cast<std::uint8_t>(v[1]), static_cast<std::uint8_t>(v[2])};
}

void save_image(const RgbImage& img, const std::string& stem, int fimg) {
  const std::string path = image_path(stem, fimg);
  if (fimg == 1)
    write_jpeg(img, path);
  else
    write_png(img, path);
}

// Heat maps and trajectory image of one region. to_world maps a backdrop
// pixel center to region coordinates; to_pixel maps back.
void write_region_images(const RegionAnalysis& r, const RgbImage& backdrop,
                         const std::function<Point2d(Point2d)>& to_world,
                         const std::function<Point2d(Point2d)>& to_pixel, const AnalyticsParams& ap,
                         const RenderParams& rp, const std::string& prefix, const std::string& suffix, int fimg) {
  const int w = backdrop.width, h = backdrop.height;
  std::vector<Point2d> world(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) world[static_cast<std::size_t>(y) * w + x] = to_world({x + 0.0, y + 0.0});
  auto at = [&](int x, int y) { return world[static_cast<std::size_t>(y) * w + x]; };
  auto freq = [](const ZoneCounts& z) {
    std::vector<double> f(z.counts.size(), 0.0);
    const double t = static_cast<double>(z.total());
    if (t > 0)
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(z.counts[i]) / t;
    return f;
  };
  const ArenaCorners& c = r.corners;
  auto edge_map = [&](int which) {
    return make_zone_map(w, h, [&](int x, int y) {
      const Point2d p = at(x, y);
      const double dn = line_distance(p, c.nw, c.ne), dw = line_distance(p, c.nw, c.sw);
      const double ds = line_distance(p, c.sw, c.se), de = line_distance(p, c.se, c.ne);
      const double d[5] = {dn, dw, ds, de, std::min({dn, dw, ds, de})};
      return zone_index(d[which], ap.zsiz, ap.nzon);
    });
  };
  const char* edge_names[5] = {"N", "W", "S", "E", "All"};
  const ZoneCounts* edge_counts[5] = {&r.edges.n, &r.edges.w, &r.edges.s, &r.edges.e, &r.edges.all};
  for (int k = 0; k < 5; ++k)
    save_image(render_heatmap(backdrop, edge_map(k), freq(*edge_counts[k]), rp),
               prefix + "Dist_Edge_" + edge_names[k] + suffix, fimg);
  auto radial_map = [&](Point2d anchor) {
    return make_zone_map(w, h, [&](int x, int y) {
      const Point2d p = at(x, y);
      return zone_index(std::hypot(p.x - anchor.x, p.y - anchor.y), ap.zsiz, ap.nzon);
    });
  };
  save_image(render_heatmap(backdrop, radial_map(r.mean), freq(r.mean_zones), rp), prefix + "Dist_MeanPos" + suffix,
             fimg);
  save_image(render_heatmap(backdrop, radial_map(r.center), freq(r.center_zones), rp),
             prefix + "Dist_CenterPos" + suffix, fimg);

  const ExplorationGrid& g = r.grid;
  const ZoneMap gm = make_zone_map(w, h, [&](int x, int y) {
    const Point2d p = at(x, y);
    const double fr = std::floor((line_distance(p, c.nw, c.ne) - g.origin_n) / ap.zsiz);
    const double fc = std::floor((line_distance(p, c.nw, c.sw) - g.origin_w) / ap.zsiz);
    if (fr < 0 || fc < 0 || fr >= g.rows || fc >= g.cols) return -1;
    return static_cast<int>(fr) * g.cols + static_cast<int>(fc);
  });
  std::vector<double> gf(g.counts.size(), 0.0);
  const double gt = static_cast<double>(g.total());
  if (gt > 0)
    for (std::size_t i = 0; i < gf.size(); ++i) gf[i] = static_cast<double>(g.counts[i]) / gt;
  save_image(render_heatmap(backdrop, gm, gf, rp), prefix + "Exploration" + suffix, fimg);

  std::vector<PixelTrack> pts;
  for (const auto& t : r.tracks) {
    PixelTrack pt;
    pt.track = t.track;
    for (const auto& p : t.points) pt.points.emplace_back(p.frame, to_pixel(p.pos));
    pts.push_back(std::move(pt));
  }
  save_image(render_trajectories(backdrop, pts, rp), prefix + "Trajectory" + suffix, fimg);
}

std::vector<std::pair<int, const TrackAnalysis*>> numbered(const RegionAnalysis& r, int arena) {
  std::vector<std::pair<int, const TrackAnalysis*>> out;
  for (const auto& t : r.tracks) out.emplace_back(arena, &t);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

std::map<int, Trajectory> track_trajectories(const std::vector<TrackingRow>& rows, const CameraModel& m,
                                             const AnalyticsParams& p, double fps) {
  std::map<int, std::vector<TrackingRow>> by_track;
  for (const auto& r : rows) by_track[r.track].push_back(r);
  std::map<int, Trajectory> out;
  for (const auto& [id, rs] : by_track)
    out[id] = postprocess(to_real_space(rs, m, fps), p.inte, p.intf, p.smoo, fps);
  return out;
}

TrackAnalysis analyze_track(int track, Trajectory points, const ArenaCorners& c, const AnalyticsParams& p,
                            double fps, std::int64_t first_frame, std::int64_t end_frame) {
  TrackAnalysis a;
  a.track = track;
  a.points = std::move(points);
  a.speed = instantaneous_speed(a.points, p.spsa);
  a.accel = instantaneous_accel(a.speed, p.spsa);
  const std::int64_t analyzed = std::max<std::int64_t>(0, end_frame - first_frame);
  std::int64_t visible = 0;
  for (const auto& q : a.points) visible += q.label == static_cast<int>(PointLabel::Confirmed);
  const bool norm = p.norm && analyzed > 0 && static_cast<double>(visible) / static_cast<double>(analyzed) >= p.rvis;
  a.grid = exploration_grid(positions(a.points), c, p.zsiz, norm);
  const double start_t = static_cast<double>(first_frame) / fps;
  const double end_t = static_cast<double>(std::max(first_frame, end_frame - 1)) / fps;
  a.transitions = detect_transitions(a.points, p.ttim, start_t, end_t);
  a.frozen = detect_frozen_events(a.points, p.fmmt, p.ftim);
  a.stats = compute_stats(a.points, a.speed, a.accel, a.grid, a.transitions, a.frozen, analyzed, fps, p.mobs);
  return a;
}

RegionAnalysis analyze_region(const std::map<int, Trajectory>& tracks, const ArenaCorners& c,
                              const AnalyticsParams& p, double fps, std::int64_t first_frame,
                              std::int64_t end_frame) {
  RegionAnalysis r;
  r.corners = c;
  std::vector<Point2d> all;
  for (const auto& [id, t] : tracks) {
    r.tracks.push_back(analyze_track(id, t, c, p, fps, first_frame, end_frame));
    for (const auto& q : t) all.push_back(q.pos);
  }
  r.mean = mean_position(all);
  r.center = c.center();
  r.edges = edge_zones(all, c, p.zsiz, p.nzon);
  r.mean_zones = radial_zones(all, r.mean, p.zsiz, p.nzon);
  r.center_zones = radial_zones(all, r.center, p.zsiz, p.nzon);
  const std::int64_t analyzed = std::max<std::int64_t>(0, end_frame - first_frame);
  const bool norm = p.norm && analyzed > 0 &&
                    static_cast<double>(visible_frames(tracks)) / static_cast<double>(analyzed) >= p.rvis;
  r.grid = exploration_grid(all, c, p.zsiz, norm);
  return r;
}

Population build_population(const std::vector<SequenceTracks>& seqs, const CameraModel& m, const AnalyticsParams& p) {
  Population pop;
  struct Source {
    int seq, arena;
    ArenaCorners corners;
    VirtualPlacement place;
    std::map<int, Trajectory> tracks;
    const SequenceTracks* s;
  };
  std::vector<Source> sources;
  int global = 0;
  for (const auto& s : seqs) {
    for (std::size_t k = 0; k < s.arenas.size(); ++k) {
      Source src;
      src.seq = s.index;
      src.arena = ++global;
      src.s = &s;
      src.corners = arena_corners(s.arenas[k].rect, m);
      const Rect& r = s.arenas[k].rect;
      src.place = mirror_placement(p.aror, (r.x0 + r.x1) / 2.0, (r.y0 + r.y1) / 2.0, s.meta.width, s.meta.height);
      src.tracks = track_trajectories(s.rows[k], m, p, s.meta.fps);
      const std::int64_t analyzed = s.meta.end_frame - s.meta.first_frame;
      if (p.norm && analyzed > 0 &&
          static_cast<double>(visible_frames(src.tracks)) / static_cast<double>(analyzed) >= p.rvis) {
        bool any = false;
        for (const auto& [id, t] : src.tracks)
          for (const auto& q : t) {
            const Point2d l{line_distance(q.pos, src.corners.nw, src.corners.sw),
                            line_distance(q.pos, src.corners.nw, src.corners.ne)};
            if (!any) {
              src.place.min = src.place.max = l;
              any = true;
            }
            src.place.min = {std::min(src.place.min.x, l.x), std::min(src.place.min.y, l.y)};
            src.place.max = {std::max(src.place.max.x, l.x), std::max(src.place.max.y, l.y)};
          }
        src.place.normalized = any;
      }
      pop.width = std::max(pop.width, src.corners.width());
      pop.height = std::max(pop.height, src.corners.height());
      sources.push_back(std::move(src));
    }
  }
  const ArenaCorners vc{{0, 0}, {pop.width, 0}, {0, pop.height}, {pop.width, pop.height}};
  std::map<int, Trajectory> all;
  int key = 0;
  double fps = seqs.empty() ? 25.0 : seqs.front().meta.fps;
  std::int64_t first = seqs.empty() ? 0 : seqs.front().meta.first_frame;
  std::int64_t end = seqs.empty() ? 0 : seqs.front().meta.end_frame;
  for (const auto& src : sources) {
    for (const auto& [id, t] : src.tracks) {
      Trajectory v = t;
      for (auto& q : v) q.pos = project_to_virtual(q.pos, src.corners, src.place, pop.width, pop.height);
      PopulationTrack pt;
      pt.sequence = src.seq;
      pt.arena = src.arena;
      pt.track = id;
      pt.analysis = analyze_track(id, v, vc, p, src.s->meta.fps, src.s->meta.first_frame, src.s->meta.end_frame);
      pop.tracks.push_back(std::move(pt));
      all[key++] = std::move(v);
    }
  }
  // Zone tables pool every individual's points; per-track analyses above keep their own windows.
  pop.region = analyze_region(all, vc, p, fps, first, end);
  pop.region.tracks.clear();
  return pop;
}

std::string format_realspace(const std::vector<std::pair<int, const TrackAnalysis*>>& tracks, const std::string& unit) {
  std::ostringstream os;
  os << "Time (sec)\tArena\tTrack\t" << pos_header(unit) << "\tLabel\n";
  for (const auto& [arena, t] : tracks)
    for (const auto& p : t->points)
      os << num(p.time) << "\t" << arena << "\t" << t->track << "\t" << num(p.pos.x) << "\t" << num(p.pos.y) << "\t"
         << p.label << "\n";
  return os.str();
}

std::string format_speed(const std::vector<std::pair<int, const TrackAnalysis*>>& tracks, const std::string& unit) {
  std::ostringstream os;
  os << "Time (sec)\tArena\tTrack\tCurrent Speed (" << unit << "/sec)\n";
  for (const auto& [arena, t] : tracks)
    for (const auto& s : t->speed) os << num(s.time) << "\t" << arena << "\t" << t->track << "\t" << num(s.value) << "\n";
  return os.str();
}

std::string format_accel(const std::vector<std::pair<int, const TrackAnalysis*>>& tracks, const std::string& unit) {
  std::ostringstream os;
  os << "Time (sec)\tArena\tTrack\tCurrent Accel. (" << unit << "/s^2)\n";
  for (const auto& [arena, t] : tracks)
    for (const auto& s : t->accel) os << num(s.time) << "\t" << arena << "\t" << t->track << "\t" << num(s.value) << "\n";
  return os.str();
}

std::string format_edge_table(const EdgeZones& z, double dst, double fps, const std::string& unit) {
  return zone_blocks({{"Edge N", &z.n}, {"Edge W", &z.w}, {"Edge S", &z.s}, {"Edge E", &z.e}, {"Edge ALL", &z.all}},
                     static_cast<int>(z.all.counts.size()), dst, fps, unit);
}

std::string format_radial_table(const ZoneCounts& z, double dst, double fps, const std::string& unit) {
  std::ostringstream os;
  const int n = static_cast<int>(z.counts.size());
  const std::int64_t total = z.total();
  const char* titles[3] = {"Frame Count", "Time Count (sec)", "Frequency (Zone Det./Total Det.)"};
  for (int b = 0; b < 3; ++b) {
    if (b > 0) os << "\n";
    for (int k = 0; k < n; ++k) os << "\t" << zone_label(k, dst, 0, unit);
    os << "\n" << titles[b];
    for (int k = 0; k < n; ++k) {
      const std::int64_t c = z.counts[k];
      os << "\t";
      if (b == 0)
        os << c;
      else if (b == 1)
        os << num(static_cast<double>(c) / fps);
      else
        os << (total > 0 ? num(static_cast<double>(c) / static_cast<double>(total)) : "n/a");
    }
    os << "\n";
  }
  return os.str();
}

std::string format_exploration_table(const ExplorationGrid& g, double dst, double fps, const std::string& unit) {
  std::ostringstream os;
  const std::int64_t total = g.total();
  const char* titles[3] = {"Frame Count", "Time Count (sec)", "Frequency (Zone Detections/Total Detections)"};
  for (int b = 0; b < 3; ++b) {
    if (b > 0) os << "\n";
    os << "\t" << titles[b] << "\n";
    for (int c = 0; c < g.cols; ++c) os << "\t" << zone_label(c, dst, g.origin_w, unit);
    os << "\n";
    for (int r = 0; r < g.rows; ++r) {
      os << zone_label(r, dst, g.origin_n, unit);
      for (int c = 0; c < g.cols; ++c) {
        const std::int64_t v = g.at(r, c);
        os << "\t";
        if (b == 0)
          os << v;
        else if (b == 1)
          os << num(static_cast<double>(v) / fps);
        else
          os << (total > 0 ? num(static_cast<double>(v) / static_cast<double>(total)) : "n/a");
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string format_transitions(const std::vector<EventRow>& rows, const std::string& unit) {
  std::ostringstream os;
  os << "Time (sec)\tVideo Seq.\tArena\tTrack\t" << pos_header(unit) << "\tLabel\n";
  for (const auto& r : rows)
    for (const auto& e : r.analysis->transitions)
      os << num(e.time) << "\t" << r.sequence << "\t" << r.arena << "\t" << r.track << "\t" << num(e.pos.x) << "\t"
         << num(e.pos.y) << "\t" << e.label << "\n";
  return os.str();
}

std::string format_frozen(const std::vector<EventRow>& rows, const std::string& unit) {
  std::ostringstream os;
  os << "Time (sec)\tVideo Seq.\tArena\tTrack\tAvg. Pos. X (" << unit << ")\tAvg. Pos. Y (" << unit
     << ")\tTime Length (sec)\n";
  for (const auto& r : rows)
    for (const auto& e : r.analysis->frozen)
      os << num(e.time) << "\t" << r.sequence << "\t" << r.arena << "\t" << r.track << "\t" << num(e.mean.x) << "\t"
         << num(e.mean.y) << "\t" << num(e.duration) << "\n";
  return os.str();
}

std::vector<StatField> stat_fields(const StatsSummary& s) {
  auto i = [](std::int64_t v) { return std::optional<double>(static_cast<double>(v)); };
  auto oi = [](const std::optional<std::int64_t>& v) {
    return v ? std::optional<double>(static_cast<double>(*v)) : std::nullopt;
  };
  return {
      {"Av. Speed", s.av_speed, false},
      {"Av. Accel", s.av_accel, false},
      {"Mobility Rate", s.mobility_rate, false},
      {"Visible Frames", i(s.visible_frames), true},
      {"Visible Time", s.visible_time, false},
      {"Invisible Frames", i(s.invisible_frames), true},
      {"Invisible Time", s.invisible_time, false},
      {"First Visible Frame", oi(s.first_visible), true},
      {"Last Visible Frame", oi(s.last_visible), true},
      {"Visibility Rate", s.visibility_rate, false},
      {"Invisibility Rate", s.invisibility_rate, false},
      {"Explored Areas", i(s.explored_areas), true},
      {"Number of Areas", i(s.number_of_areas), true},
      {"Exploration Rate", s.exploration_rate, false},
      {"Total Distance", s.total_distance, false},
      {"Transitions to White", i(s.transitions_to_white), true},
      {"Transitions to Black", i(s.transitions_to_black), true},
      {"Number of Frozen Events", i(s.frozen_count), true},
      {"Total Time Frozen", s.total_time_frozen, false},
      {"Average Time Frozen", s.average_time_frozen, false},
  };
}

namespace {

void write_video_header(std::ostringstream& os, const StatsHeader& h) {
  os << "Video Resolution\t[" << h.width << " x " << h.height << "]\n";
  os << "Video FrameRate\t" << num(h.fps) << "\n";
  os << "Analysed Video Frames\t" << h.analyzed_frames << "\n";
  os << "Analysed Video Time\t" << num(static_cast<double>(h.analyzed_frames) / h.fps) << "\n";
}

}  // namespace

std::string format_stats(const StatsHeader& h, const RegionAnalysis& r, const CameraModel& m) {
  std::ostringstream os;
  os << "Parameter Name\tValue\n";
  write_video_header(os, h);
  const Rect& R = h.rect;
  const ArenaCorners& c = r.corners;
  auto w3 = [](Point2d p) { return "[" + num(p.x) + ", " + num(p.y) + ", 1]"; };
  os << "Arena\t" << h.arena << " " << h.name << " " << point_text({R.x0 - 0.5, R.y0 - 0.5}) << " "
     << point_text({R.x1 - 0.5, R.y0 - 0.5}) << " " << point_text({R.x0 - 0.5, R.y1 - 0.5}) << " "
     << point_text({R.x1 - 0.5, R.y1 - 0.5}) << " " << w3(c.nw) << " " << w3(c.ne) << " " << w3(c.sw) << " "
     << w3(c.se) << "\n";
  os << "Arena Size\t[" << R.width() << " x " << R.height() << "] [" << num(c.width()) << " x " << num(c.height())
     << "]\n";
  os << "Arena Center\t" << point_text(r.center) << "\n";
  os << "Mean Position\t" << point_text(r.mean) << "\n";
  os << "Unit\t" << m.unit_name << "\n";
  for (const auto& t : r.tracks) {
    os << "\nTrack\t" << t.track << "\n";
    for (const auto& f : stat_fields(t.stats)) os << f.name << "\t" << field_text(f) << "\n";
  }
  return os.str();
}

std::string format_population_stats(const Population& pop, const StatsHeader& h) {
  std::ostringstream os;
  os << "Parameter Name\tValue\n";
  write_video_header(os, h);
  os << "Virtual Arena Size\t[" << num(pop.width) << " x " << num(pop.height) << "]\n";
  os << "Mean Position\t" << point_text(pop.region.mean) << "\n";
  os << "Individuals\t" << pop.tracks.size() << "\n";
  os << "\nParameter Name\tMean\tStd. Dev.\n";
  if (pop.tracks.empty()) return os.str();
  const auto names = stat_fields(pop.tracks.front().analysis.stats);
  for (std::size_t f = 0; f < names.size(); ++f) {
    double sum = 0, sum2 = 0;
    int n = 0;
    for (const auto& t : pop.tracks) {
      const auto v = stat_fields(t.analysis.stats)[f].value;
      if (!v) continue;
      sum += *v;
      ++n;
    }
    os << names[f].name << "\t";
    if (n == 0) {
      os << "n/a\tn/a\n";
      continue;
    }
    const double mean = sum / n;
    for (const auto& t : pop.tracks) {
      const auto v = stat_fields(t.analysis.stats)[f].value;
      if (v) sum2 += (*v - mean) * (*v - mean);
    }
    os << num(mean) << "\t" << num(std::sqrt(sum2 / n)) << "\n";
  }
  return os.str();
}

OutputOptions output_options(const Config& c) {
  return {c.integer("out.ftxt"), c.integer("out.fjpg"), c.integer("out.fimg")};
}

std::string image_path(const std::string& stem, int fimg) { return stem + (fimg == 1 ? ".jpg" : ".png"); }

void write_results(const Project& pr, const std::vector<SequenceTracks>& seqs, const std::string& dir,
                   const OutputOptions& o) {
  const std::string name = pr.name();
  const AnalyticsParams ap = analytics_params(pr.config);
  const RenderParams rp = render_params(pr.colors);
  const CameraModel& cam = pr.camera;
  const std::string unit = cam.unit_name;
  const fs::path root(dir);
  auto out = [&](const std::string& rel, const std::string& content) { write_file((root / rel).string(), content); };

  // Project files.
  std::vector<SequenceInput> inputs = pr.sequences;
  out(name + "_Input.txt", format_input(inputs));
  out(name + "_Configuration.txt", pr.config.write());
  std::vector<Rect> rects;
  std::vector<std::string> names;
  if (!seqs.empty())
    for (const auto& a : seqs.front().arenas) {
      rects.push_back(a.rect);
      names.push_back(a.name);
    }
  save_arena_rects(rects, (root / (name + "_Arena.txt")).string());
  save_arena_names(names, (root / (name + "_ArenaNames.txt")).string());
  out(name + "_Calibrator.txt", format_calibrator(cam));
  std::vector<OutputSequence> index;
  for (const auto& s : seqs) index.push_back(s.meta);
  out(name + "_Output.txt", format_output_index(index));

  std::ostringstream stats_csv, files_csv;
  files_csv << "File Name,Video,Seq,Output Folder,Output File\n";
  stats_csv << "Seq,Arena,Arena Name,Track";
  for (const auto& f : stat_fields(StatsSummary{})) stats_csv << "," << f.name;
  stats_csv << "\n";

  int global_arena = 0;
  for (const auto& s : seqs) {
    const fs::path sdir = root / ("Seq" + std::to_string(s.index + 1));
    fs::create_directories(sdir);
    for (std::size_t f = 0; f < s.files.size(); ++f)
      files_csv << csv_field(s.files[f]) << "," << f + 1 << "," << s.index + 1 << "," << csv_field(name + "/") << ","
                << csv_field(name + "_Stats.csv") << "\n";
    const double fps = s.meta.fps;
    for (std::size_t k = 0; k < s.arenas.size(); ++k) {
      ++global_arena;
      const int a1 = static_cast<int>(k) + 1;
      const std::string sfx = "_" + std::to_string(a1);
      write_file((sdir / ("Tracking_" + std::to_string(k) + ".txt")).string(), format_tracking(s.rows[k]));
      if (o.ftxt < 1 && o.fjpg < 1) continue;
      const ArenaInfo& ai = s.arenas[k];
      const ArenaCorners corners = arena_corners(ai.rect, cam);
      const RegionAnalysis r =
          analyze_region(track_trajectories(s.rows[k], cam, ap, fps), corners, ap, fps, s.meta.first_frame,
                         s.meta.end_frame);
      if (o.ftxt >= 1) {
        write_file((sdir / ("Tracking_RealSpace" + sfx + ".txt")).string(), format_realspace(numbered(r, a1), unit));
        StatsHeader h{s.meta.width, s.meta.height, fps, s.meta.end_frame - s.meta.first_frame, a1, ai.name, ai.rect};
        write_file((sdir / ("Stats" + sfx + ".txt")).string(), format_stats(h, r, cam));
        for (const auto& t : r.tracks) {
          stats_csv << s.index + 1 << "," << a1 << "," << csv_field(ai.name) << "," << t.track;
          for (const auto& f : stat_fields(t.stats)) stats_csv << "," << field_text(f);
          stats_csv << "\n";
        }
      }
      if (o.ftxt >= 2) {
        write_file((sdir / ("Instant_Speed" + sfx + ".txt")).string(), format_speed(numbered(r, a1), unit));
        write_file((sdir / ("Instant_Accel" + sfx + ".txt")).string(), format_accel(numbered(r, a1), unit));
        write_file((sdir / ("Dist_Edges" + sfx + ".txt")).string(), format_edge_table(r.edges, ap.zsiz, fps, unit));
        write_file((sdir / ("Dist_MeanPos" + sfx + ".txt")).string(),
                   format_radial_table(r.mean_zones, ap.zsiz, fps, unit));
        write_file((sdir / ("Dist_CenterPos" + sfx + ".txt")).string(),
                   format_radial_table(r.center_zones, ap.zsiz, fps, unit));
        write_file((sdir / ("Exploration" + sfx + ".txt")).string(),
                   format_exploration_table(r.grid, ap.zsiz, fps, unit));
        std::vector<EventRow> ev;
        for (const auto& t : r.tracks) ev.push_back({s.index, a1, t.track, &t});
        write_file((sdir / ("Transitions" + sfx + ".txt")).string(), format_transitions(ev, unit));
        write_file((sdir / ("FrozenEvents" + sfx + ".txt")).string(), format_frozen(ev, unit));
      }
      if (o.fjpg >= 1 && s.reference.width > 0) {
        const RgbImage backdrop = to_rgb(crop(s.reference, ai.rect));
        const Point2d origin{static_cast<double>(ai.rect.x0), static_cast<double>(ai.rect.y0)};
        write_region_images(
            r, backdrop, [&](Point2d p) { return pixel_to_world({p.x + origin.x, p.y + origin.y}, cam); },
            [&](Point2d w) {
              const Point2d px = world_to_pixel(w, cam);
              return Point2d{px.x - origin.x, px.y - origin.y};
            },
            ap, rp, (sdir / "").string(), sfx, o.fimg);
      }
    }
  }

  if (o.ftxt < 1 && o.fjpg < 1) return;
  const Population pop = build_population(seqs, cam, ap);
  std::vector<std::pair<int, const TrackAnalysis*>> pt;
  std::vector<EventRow> pev;
  for (const auto& t : pop.tracks) {
    pt.emplace_back(t.arena, &t.analysis);
    pev.push_back({t.sequence, t.arena, t.track, &t.analysis});
  }
  const double fps = seqs.empty() ? 25.0 : seqs.front().meta.fps;
  if (o.ftxt >= 1) {
    out("Tracking_RealSpace.txt", format_realspace(pt, unit));
    StatsHeader h;
    if (!seqs.empty()) {
      h.width = seqs.front().meta.width;
      h.height = seqs.front().meta.height;
      h.fps = fps;
      h.analyzed_frames = seqs.front().meta.end_frame - seqs.front().meta.first_frame;
    }
    out("Stats.txt", format_population_stats(pop, h));
    out(name + "_Files.csv", files_csv.str());
    out(name + "_Stats.csv", stats_csv.str());
    std::ostringstream pcsv;
    pcsv << "Parameter,Mean,Std. Dev.\n";
    const std::string ps = format_population_stats(pop, h);
    const auto lines = split_lines(ps);
    bool table = false;
    for (const auto& l : lines) {
      if (l.rfind("Parameter Name\tMean", 0) == 0) {
        table = true;
        continue;
      }
      if (!table || l.empty()) continue;
      std::string row = l;
      std::replace(row.begin(), row.end(), '\t', ',');
      pcsv << row << "\n";
    }
    out(name + "_Population.csv", pcsv.str());
  }
  if (o.ftxt >= 2) {
    out("Instant_Speed.txt", format_speed(pt, unit));
    out("Instant_Accel.txt", format_accel(pt, unit));
    out("Dist_Edges.txt", format_edge_table(pop.region.edges, ap.zsiz, fps, unit));
    out("Dist_MeanPos.txt", format_radial_table(pop.region.mean_zones, ap.zsiz, fps, unit));
    out("Dist_CenterPos.txt", format_radial_table(pop.region.center_zones, ap.zsiz, fps, unit));
    out("Exploration.txt", format_exploration_table(pop.region.grid, ap.zsiz, fps, unit));
    out("Transitions.txt", format_transitions(pev, unit));
    out("FrozenEvents.txt", format_frozen(pev, unit));
  }
  if (o.fjpg >= 1 && pop.width > 0 && pop.height > 0) {
    // Real scale: calibration pixels per unit, bounded to a sane image size.
    double scale = (cam.fx() + cam.fy()) / 2.0;
    const double longest = std::max(pop.width, pop.height) * scale;
    if (longest > 1600) scale *= 1600 / longest;
    if (longest < 100) scale *= 100 / longest;
    const int w = std::max(1, static_cast<int>(std::lround(pop.width * scale)));
    const int h = std::max(1, static_cast<int>(std::lround(pop.height * scale)));
    RgbImage backdrop(w, h);
    const Rgb bg = rgb_of(rp.background_rgb);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) std::copy(bg.begin(), bg.end(), backdrop.px(x, y));
    RegionAnalysis region = pop.region;
    for (const auto& t : pop.tracks) region.tracks.push_back(t.analysis);
    write_region_images(
        region, backdrop, [&](Point2d p) { return Point2d{(p.x + 0.5) / scale, (p.y + 0.5) / scale}; },
        [&](Point2d v) { return Point2d{v.x * scale - 0.5, v.y * scale - 0.5}; }, ap, rp, (root / "").string(), "",
        o.fimg);
  }
}

OutputStage::OutputStage(const std::string& root, const std::string& name) : name_(name) {
  if (name.empty() || name.find('/') != std::string::npos || name == "." || name == "..")
    throw ConfigError("invalid project name for output folder: '" + name + "'");
  const fs::path r(root);
  staging_ = (r / ("." + name + ".staging")).string();
  final_ = (r / name).string();
  std::error_code ec;
  fs::create_directories(r, ec);
  if (ec) throw IoError("cannot create output root " + root + ": " + ec.message());
  fs::remove_all(staging_, ec);
  if (!fs::create_directory(staging_, ec) || ec)
    throw IoError("cannot create output folder " + staging_ + (ec ? ": " + ec.message() : ""));
  const std::string probe = (fs::path(staging_) / ".probe").string();
  write_file(probe, "");
  fs::remove(probe, ec);
}

OutputStage::~OutputStage() {
  if (committed_) return;
  std::error_code ec;
  fs::remove_all(staging_, ec);
}

void OutputStage::commit() {
  std::error_code ec;
  if (fs::exists(final_)) {
    // Only replace folders produced by an earlier run of this project.
    const bool ours = fs::is_directory(final_) && (fs::exists(fs::path(final_) / (name_ + "_Output.txt")) ||
                                                   fs::is_empty(final_));
    if (!ours) throw IoError("refusing to replace " + final_ + ": not an output folder of project " + name_);
    fs::remove_all(final_, ec);
    if (ec) throw IoError("cannot remove previous output " + final_ + ": " + ec.message());
  }
  fs::rename(staging_, final_, ec);
  if (ec) throw IoError("cannot move results into " + final_ + ": " + ec.message());
  committed_ = true;
}

}  // namespace arenatrack

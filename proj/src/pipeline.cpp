#include "arenatrack/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>

#include "arenatrack/errors.hpp"
#include "arenatrack/image_io.hpp"
#include "arenatrack/imaging.hpp"
#include "arenatrack/kernels.hpp"
#include "arenatrack/text.hpp"

namespace fs = std::filesystem;

namespace arenatrack {

namespace {

double round_to_file(double v) { return *parse_number(format_number(v)); }

void report(const RunOptions& o, const char* stage, int seq, double percent) {
  if (o.progress) o.progress({stage, seq, std::clamp(percent, 0.0, 100.0)});
}

void check_stop(const RunOptions& o) {
  if (o.stop && o.stop->load()) throw StoppedError();
}

}  // namespace

int effective_threads(const Config& c, std::optional<int> requested) {
  if (requested) {
    if (*requested < 1) throw ConfigError("--threads must be at least 1");
    return *requested;
  }
  if (const char* env = std::getenv("ARENATRACK_THREADS")) {
    const auto v = parse_integer(env);
    if (!v || *v < 1) throw ConfigError(std::string("ARENATRACK_THREADS must be a positive integer, got '") + env + "'");
    return static_cast<int>(*v);
  }
  return threads_param(c);
}

PipelineParams pipeline_params(const Config& c, bool no_identity) {
  PipelineParams p;
  p.gmm = gmm_params(c);
  p.det = detection_params(c);
  p.tracker = tracker_params(c);
  p.features = feature_params(c);
  p.identity = identity_params(c);
  p.idff = c.integer("kal.idff");
  p.gfil = c.integer("pre.gfil");
  p.normalize = c.integer("pre.norm") != 0;
  const int ntra = p.tracker.ntra;
  p.run_identity = !no_identity && (ntra == 1 || p.identity.idal > 0);
  p.extract_features = !no_identity && ntra > 1;
  p.gmm.validate();
  p.det.validate();
  p.tracker.validate();
  if (p.gfil != 0 && (p.gfil < 3 || p.gfil % 2 == 0))
    throw ConfigError("pre.gfil must be 0 or an odd size >= 3, got " + std::to_string(p.gfil));
  return p;
}

std::vector<Arena> sequence_arenas(const Frame& reference, const Project& pr, std::vector<std::string>* warnings) {
  const ArenaParams ap = arena_params(pr.config);
  std::vector<Arena> out;
  if (pr.config.integer("roi.mode") == 1) {
    if (pr.arena_rects.empty()) throw ConfigError("roi.mode 1 (manual) needs arena rectangles in " + pr.paths.arena);
    const auto outcomes = define_arenas_manual(reference, pr.arena_rects, pr.arena_names, ap);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (outcomes[i].arena)
        out.push_back(*outcomes[i].arena);
      else if (warnings)
        warnings->push_back("arena " + std::to_string(i + 1) + " skipped: " + outcomes[i].error);
    }
  } else {
    out = define_arenas_automatic(reference, ap);
    if (pr.arena_names.size() == out.size())
      for (std::size_t i = 0; i < out.size(); ++i) out[i].name = pr.arena_names[i];
  }
  if (out.empty()) throw ProcessingError("no arenas found in the reference frame");
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

struct SequenceTracker::ArenaState {
  Arena arena;
  BackgroundModel bg;
  Tracker tracker;
  IdentityEngine identity;
  std::vector<Track> archive;

  ArenaState(const Arena& a, const PipelineParams& p)
      : arena(a), bg(a.rect.width(), a.rect.height(), p.gmm), tracker(p.tracker), identity(p.identity) {}
};

SequenceTracker::SequenceTracker(std::vector<Arena> arenas, const PipelineParams& p, const CameraModel& camera,
                                 int width, int height, int threads)
    : arenas_(std::move(arenas)), p_(p), threads_(std::max(1, threads)) {
  identity_map_ = is_identity_map(camera);
  if (!identity_map_) map_ = build_undistortion_map(camera, width, height);
  for (const Arena& a : arenas_) states_.push_back(std::make_unique<ArenaState>(a, p_));
}

SequenceTracker::~SequenceTracker() = default;

void SequenceTracker::process(const Frame& raw) {
  kernels::set_threads(threads_);
  undistorted_ = identity_map_ ? raw : undistort_frame(raw, map_);
  undistorted_.index = raw.index;
  undistorted_.time_s = raw.time_s;
  const Frame pre = normalize_and_blur(undistorted_, p_.gfil, p_.normalize);
  const std::int64_t frame = raw.index;
  last_frame_ = frame;
  const int n = static_cast<int>(states_.size());
#pragma omp parallel for num_threads(threads_) schedule(dynamic) if (n > 1 && threads_ > 1)
  for (int k = 0; k < n; ++k) {
    ArenaState& s = *states_[k];
    const Frame local = crop(pre, s.arena.rect);
    const BinaryMask fg = s.bg.apply(local);
    auto dets = detect(local, s.arena, fg, p_.det);
    std::vector<TrackInput> inputs;
    inputs.reserve(dets.size());
    Frame texture;
    if (p_.extract_features) texture = crop(undistorted_, s.arena.rect);
    for (auto& d : dets) {
      TrackInput in{std::move(d), std::nullopt};
      if (p_.extract_features) in.features = extract_features(in.det.blob, texture, frame, p_.features);
      inputs.push_back(std::move(in));
    }
    s.tracker.step(frame, std::move(inputs));
    if (static_cast<int>(s.tracker.live_tracks()) >= p_.idff) {
      if (p_.run_identity) s.identity.flush(s.tracker.tracks());
      auto& live = s.tracker.tracks();
      auto split = std::stable_partition(live.begin(), live.end(),
                                         [](const Track& t) { return t.status != TrackStatus::Inactive; });
      for (auto it = split; it != live.end(); ++it) {
        it->features.clear();
        s.archive.push_back(std::move(*it));
      }
      live.erase(split, live.end());
    }
  }
}

std::vector<std::vector<TrackingRow>> SequenceTracker::finish(std::vector<std::string>* diagnostics) {
  std::vector<std::vector<TrackingRow>> out(states_.size());
  for (std::size_t k = 0; k < states_.size(); ++k) {
    ArenaState& s = *states_[k];
    s.tracker.finish(last_frame_ + 1);
    std::vector<Track> all = std::move(s.archive);
    for (auto& t : s.tracker.tracks()) all.push_back(std::move(t));
    s.tracker.tracks().clear();
    std::sort(all.begin(), all.end(), [](const Track& a, const Track& b) {
      return a.first_frame() != b.first_frame() ? a.first_frame() < b.first_frame() : a.id < b.id;
    });
    std::map<int, int> label;
    if (p_.run_identity) {
      const IdentityOutcome r = s.identity.finalize(all);
      if (diagnostics && !r.diagnostics.empty())
        diagnostics->push_back("arena " + std::to_string(k + 1) + ": " + trim(r.diagnostics));
      int next = p_.tracker.ntra;
      for (const Track& t : all) {
        const auto it = r.assignment.find(t.id);
        const int ind = it == r.assignment.end() ? 0 : it->second;
        label[t.id] = ind > 0 ? ind : ++next;
      }
    } else {
      int next = 0;
      for (const Track& t : all) label[t.id] = ++next;
    }
    auto& rows = out[k];
    for (const Track& t : all)
      for (const TrackPoint& q : t.points)
        rows.push_back({q.frame, static_cast<int>(k), label[t.id], {round_to_file(q.pos.x), round_to_file(q.pos.y)},
                        static_cast<int>(PointLabel::Confirmed)});
    std::sort(rows.begin(), rows.end(), [](const TrackingRow& a, const TrackingRow& b) {
      return a.track != b.track ? a.track < b.track : a.frame < b.frame;
    });
  }
  return out;
}

std::vector<std::vector<std::vector<Point2d>>> SequenceTracker::recent_paths(int length) const {
  std::vector<std::vector<std::vector<Point2d>>> out;
  for (const auto& s : states_) {
    std::vector<std::vector<Point2d>> paths;
    for (const Track& t : s->tracker.tracks()) {
      if (t.status != TrackStatus::Active) continue;
      std::vector<Point2d> path;
      const std::size_t n = t.points.size();
      const std::size_t from = n > static_cast<std::size_t>(std::max(1, length)) ? n - std::max(1, length) : 0;
      for (std::size_t i = from; i < n; ++i) path.push_back(t.points[i].pos);
      paths.push_back(std::move(path));
    }
    out.push_back(std::move(paths));
  }
  return out;
}

std::unique_ptr<ConcatSource> open_sequence(const SequenceInput& s, double default_fps) {
  std::vector<std::unique_ptr<FrameSource>> parts;
  for (const auto& f : s.files) parts.push_back(open_source(f, default_fps));
  return std::make_unique<ConcatSource>(std::move(parts));
}

namespace {

Frame reference_frame(ConcatSource& src, const SequenceInput& s, const CameraModel& cam) {
  const std::int64_t idx = src.global_index(s.ref_video, s.ref_frame);
  if (idx < 0 || idx >= src.count())
    throw ConfigError("reference frame " + std::to_string(s.ref_frame) + " of video " + std::to_string(s.ref_video) +
                      " is outside the sequence");
  const Frame raw = src.frame(idx);
  if (is_identity_map(cam)) return raw;
  return undistort_frame(raw, build_undistortion_map(cam, raw.width, raw.height));
}

Config effective_config(const Project& pr, const RunOptions& o) {
  Config c = pr.config;
  if (o.start_min) c.set("oth.mini", format_number(*o.start_min));
  if (o.end_min) c.set("oth.mend", format_number(*o.end_min));
  if (o.out_level) c.set("out.ftxt", std::to_string(*o.out_level));
  return c;
}

Rgb rgb_triplet(const std::vector<int>& v) {
  return {static_cast<std::uint8_t>(v[0]), static_cast<std::uint8_t>(v[1]), static_cast<std::uint8_t>(v[2])};
}

void dump_frame(const SequenceTracker& st, const RenderParams& rp, const std::string& path, int fimg) {
  RgbImage img = to_rgb(st.undistorted());
  const Rgb roi = rgb_triplet(rp.area_rgb);
  for (const Arena& a : st.arenas()) {
    const double x0 = a.rect.x0, y0 = a.rect.y0, x1 = a.rect.x1 - 1, y1 = a.rect.y1 - 1;
    draw_line(img, {x0, y0}, {x1, y0}, roi, rp.roi_width);
    draw_line(img, {x1, y0}, {x1, y1}, roi, rp.roi_width);
    draw_line(img, {x1, y1}, {x0, y1}, roi, rp.roi_width);
    draw_line(img, {x0, y1}, {x0, y0}, roi, rp.roi_width);
  }
  const auto paths = st.recent_paths(rp.traj_long);
  for (const auto& arena : paths)
    for (std::size_t t = 0; t < arena.size(); ++t)
      for (std::size_t i = 0; i < arena[t].size(); ++i)
        draw_line(img, arena[t][i > 0 ? i - 1 : 0], arena[t][i], track_color(static_cast<int>(t)),
                  rp.trajectory_width);
  const std::string file = image_path(path, fimg);
  if (fimg == 1)
    write_jpeg(img, file);
  else
    write_png(img, file);
}

}  // namespace

RunSummary run_project(const Project& pr_in, const RunOptions& o) {
  Project pr = pr_in;
  pr.config = effective_config(pr_in, o);
  const int threads = effective_threads(pr.config, o.threads);
  const PipelineParams pp = pipeline_params(pr.config, o.no_identity);
  const OutputOptions oo = output_options(pr.config);
  const RenderParams rp = render_params(pr.colors);
  const double default_fps = pr.config.real("oth.frat");
  const int step = pr.config.integer("out.step");
  RunSummary sum;

  // Fail before any analysis when the output location is unusable.
  OutputStage stage(o.out_root.empty() ? pr.base_dir : o.out_root, pr.name());
  sum.output_dir = stage.final_dir();

  for (std::size_t si = 0; si < pr.sequences.size(); ++si) {
    const int seq1 = static_cast<int>(si) + 1;
    const SequenceInput& in = pr.sequences[si];
    auto src = open_sequence(in, default_fps);
    const Frame ref = reference_frame(*src, in, pr.camera);
    std::vector<Arena> arenas = sequence_arenas(ref, pr, &sum.warnings);
    const auto [first, end] =
        analysis_window(src->count(), src->fps(), pr.config.real("oth.mini"), pr.config.real("oth.mend"));
    if (end <= first) throw ConfigError("analysis window of sequence " + std::to_string(seq1) + " is empty");

    SequenceTracks st;
    st.index = static_cast<int>(si);
    st.files = in.files;
    st.reference = ref;
    for (const Arena& a : arenas) st.arenas.push_back({a.name, a.rect});
    st.meta.first_frame = first;
    st.meta.end_frame = end;
    st.meta.fps = src->fps();
    st.meta.width = src->width();
    st.meta.height = src->height();
    for (std::size_t k = 0; k < arenas.size(); ++k)
      st.meta.tracking_files.push_back("Seq" + std::to_string(seq1) + "/Tracking_" + std::to_string(k) + ".txt");

    const fs::path frames_dir = fs::path(stage.dir()) / ("Seq" + std::to_string(seq1)) / "Frames";
    if (oo.fjpg >= 2) fs::create_directories(frames_dir);

    SequenceTracker tracker(std::move(arenas), pp, pr.camera, src->width(), src->height(), threads);
    report(o, "tracking", seq1, 0);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::int64_t f = first; f < end; ++f) {
      check_stop(o);
      const Frame raw = src->frame(f);
      tracker.process(raw);
      const std::int64_t done = f - first + 1;
      if (oo.fjpg >= 2 && (done - 1) % step == 0)
        dump_frame(tracker, rp, (frames_dir / ("frame_" + std::to_string(f))).string(), oo.fimg);
      if (done % step == 0) report(o, "tracking", seq1, 100.0 * static_cast<double>(done) / (end - first));
    }
    report(o, "tracking", seq1, 100);
    report(o, "identity", seq1, 0);
    std::vector<std::string> diag;
    st.rows = tracker.finish(&diag);
    sum.tracking_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (auto& d : diag) sum.warnings.push_back("sequence " + std::to_string(seq1) + " " + d);
    report(o, "identity", seq1, 100);
    sum.frames += end - first;
    for (const auto& rows : st.rows) {
      std::map<int, int> ids;
      for (const auto& r : rows) ids[r.track] = 1;
      sum.tracks += static_cast<int>(ids.size());
    }
    sum.sequences.push_back(std::move(st));
  }
  check_stop(o);
  if (sum.tracks == 0) sum.warnings.push_back("no tracks were produced");

  // Sequence 0 marks the stages that span all sequences.
  report(o, "analytics", 0, 0);
  write_results(pr, sum.sequences, stage.dir(), oo);
  report(o, "analytics", 0, 100);
  report(o, "writing", 0, 0);
  check_stop(o);
  stage.commit();
  report(o, "writing", 0, 100);
  return sum;
}

RunSummary render_project(const Project& pr_in, const RunOptions& o) {
  Project pr = pr_in;
  pr.config = effective_config(pr_in, o);
  const OutputOptions oo = output_options(pr.config);
  const std::string root = o.out_root.empty() ? pr.base_dir : o.out_root;
  const fs::path existing = fs::path(root) / pr.name();
  const std::string index_path = (existing / (pr.name() + "_Output.txt")).string();
  if (!fs::exists(index_path)) throw IoError("no previous results: " + index_path + " not found");
  const auto index = parse_output_index(read_file(index_path), index_path);
  if (index.size() != pr.sequences.size())
    throw ConfigError(index_path + " lists " + std::to_string(index.size()) + " sequences, the project has " +
                      std::to_string(pr.sequences.size()));
  RunSummary sum;
  const double default_fps = pr.config.real("oth.frat");
  for (std::size_t si = 0; si < index.size(); ++si) {
    check_stop(o);
    const SequenceInput& in = pr.sequences[si];
    auto src = open_sequence(in, default_fps);
    SequenceTracks st;
    st.index = static_cast<int>(si);
    st.files = in.files;
    st.meta = index[si];
    st.reference = reference_frame(*src, in, pr.camera);
    const auto arenas = sequence_arenas(st.reference, pr, &sum.warnings);
    if (arenas.size() != st.meta.tracking_files.size())
      throw ProcessingError("sequence " + std::to_string(si + 1) + ": " + std::to_string(arenas.size()) +
                            " arenas found but " + std::to_string(st.meta.tracking_files.size()) +
                            " tracking files recorded");
    for (std::size_t k = 0; k < arenas.size(); ++k) {
      st.arenas.push_back({arenas[k].name, arenas[k].rect});
      const std::string path = (existing / st.meta.tracking_files[k]).string();
      st.rows.push_back(parse_tracking(read_file(path), path));
      std::set<int> ids;
      for (const auto& r : st.rows.back()) ids.insert(r.track);
      sum.tracks += static_cast<int>(ids.size());
    }
    sum.frames += st.meta.end_frame - st.meta.first_frame;
    sum.sequences.push_back(std::move(st));
  }
  report(o, "analytics", 0, 0);
  OutputStage stage(root, pr.name());
  sum.output_dir = stage.final_dir();
  write_results(pr, sum.sequences, stage.dir(), oo);
  // Per-frame dumps come from tracking and are carried over unchanged.
  for (std::size_t si = 0; si < index.size(); ++si) {
    const fs::path frames = existing / ("Seq" + std::to_string(si + 1)) / "Frames";
    if (fs::exists(frames))
      fs::copy(frames, fs::path(stage.dir()) / ("Seq" + std::to_string(si + 1)) / "Frames",
               fs::copy_options::recursive);
  }
  check_stop(o);
  stage.commit();
  report(o, "analytics", 0, 100);
  return sum;
}

Throughput measure_throughput(const std::vector<Frame>& frames, const std::vector<Arena>& arenas,
                              const PipelineParams& p, const CameraModel& camera, int threads) {
  Throughput t;
  if (frames.empty()) return t;
  SequenceTracker st(arenas, p, camera, frames.front().width, frames.front().height, threads);
  const auto t0 = std::chrono::steady_clock::now();
  for (const Frame& f : frames) st.process(f);
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  t.frames = static_cast<std::int64_t>(frames.size());
  return t;
}

}  // namespace arenatrack

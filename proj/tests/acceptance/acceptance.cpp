// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "arenatrack/analytics.hpp"
#include "arenatrack/arena.hpp"
#include "arenatrack/background.hpp"
#include "arenatrack/calibration.hpp"
#include "arenatrack/config.hpp"
#include "arenatrack/frame_source.hpp"
#include "arenatrack/hungarian.hpp"
#include "arenatrack/kalman.hpp"
#include "arenatrack/outputs.hpp"
#include "arenatrack/pipeline.hpp"
#include "arenatrack/project.hpp"
#include "arenatrack/synth.hpp"
#include "arenatrack/text.hpp"

namespace fs = std::filesystem;
using namespace arenatrack;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

fs::path work_root() {
  static const fs::path root = [] {
    const fs::path p = fs::temp_directory_path() / ("arenatrack_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

fs::path fresh(const std::string& name) {
  const fs::path d = work_root() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Video plus project, configured the way `arenatrack synth --project` does it.
std::string synthetic_project(const fs::path& dir, const Scene& s, const std::map<std::string, std::string>& extra) {
  SyntheticSource src(s);
  write_y8(src, (dir / "synthetic.y8").string());
  Config c = default_config();
  c.set("out.pnam", "Synthetic");
  c.set("oth.frat", format_number(s.fps));
  const std::size_t per_arena = std::max<std::size_t>(1, s.blobs.size() / s.arenas.size());
  c.set("kal.ntra", std::to_string(per_arena));
  if (per_arena > 1) c.set("kal.idal", "1");
  for (const auto& [k, v] : extra) c.set(k, v);
  SequenceInput seq;
  seq.files = {"synthetic.y8"};
  return write_project(dir.string(), c, {seq}, &s.camera);
}

int run_cli(const std::string& args, std::string* output = nullptr) {
  const std::string cmd = std::string(ARENATRACK_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return -1;
  std::array<char, 4096> buf;
  std::string out;
  while (std::fgets(buf.data(), buf.size(), p)) out += buf.data();
  const int status = pclose(p);
  if (output) *output = out;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Analytics identities over every arena and track of a run; returns the worst deviation.
struct IdentityCheck {
  double zone_sum = 0;
  double visibility_sum = 0;
  int regions = 0;
};

void zone_deviation(const ZoneCounts& z, double& worst) {
  const std::int64_t total = z.total();
  if (total == 0) return;
  double s = 0;
  for (auto c : z.counts) s += static_cast<double>(c) / static_cast<double>(total);
  worst = std::max(worst, std::abs(s - 1));
}

void grid_deviation(const ExplorationGrid& g, double& worst) {
  const std::int64_t total = g.total();
  if (total == 0) return;
  double s = 0;
  for (auto c : g.counts) s += static_cast<double>(c) / static_cast<double>(total);
  worst = std::max(worst, std::abs(s - 1));
}

void check_region(const RegionAnalysis& r, IdentityCheck& ic) {
  ++ic.regions;
  for (const ZoneCounts* z : {&r.edges.n, &r.edges.w, &r.edges.s, &r.edges.e, &r.edges.all, &r.mean_zones,
                              &r.center_zones})
    zone_deviation(*z, ic.zone_sum);
  grid_deviation(r.grid, ic.zone_sum);
  for (const auto& t : r.tracks) {
    if (!t.stats.visibility_rate || !t.stats.invisibility_rate) continue;
    ic.visibility_sum = std::max(ic.visibility_sum, std::abs(*t.stats.visibility_rate + *t.stats.invisibility_rate - 1));
  }
}

void check_run(const Project& pr, const RunSummary& run, IdentityCheck& ic) {
  const AnalyticsParams ap = analytics_params(pr.config);
  for (const auto& s : run.sequences)
    for (std::size_t k = 0; k < s.arenas.size(); ++k)
      check_region(analyze_region(track_trajectories(s.rows[k], pr.camera, ap, s.meta.fps),
                                  arena_corners(s.arenas[k].rect, pr.camera), ap, s.meta.fps, s.meta.first_frame,
                                  s.meta.end_frame),
                   ic);
  check_region(build_population(run.sequences, pr.camera, ap).region, ic);
}

IdentityCheck g_identities;

Outcome detection_rate() {
  const Scene s = preset_scene("four-arena");
  const fs::path dir = fresh("detection");
  const Project pr = load_project(synthetic_project(dir, s, {}));
  RunOptions o;
  o.out_root = (dir / "out").string();
  const auto t0 = Clock::now();
  const RunSummary run = run_project(pr, o);
  const double secs = seconds_since(t0);
  check_run(pr, run, g_identities);

  const auto& rows = run.sequences.at(0).rows;
  if (rows.size() != s.arenas.size())
    return {false, std::to_string(rows.size()) + " arenas found, scene has " + std::to_string(s.arenas.size())};
  std::vector<std::multimap<std::int64_t, Point2d>> by_frame(rows.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (const auto& r : rows[a]) by_frame[a].emplace(r.frame, r.pixel);
  std::int64_t truth_points = 0, found = 0;
  double sq = 0;
  for (const TruthPoint& t : scene_truth(s)) {
    ++truth_points;
    auto [lo, hi] = by_frame[t.arena].equal_range(t.frame);
    double best = std::numeric_limits<double>::infinity();
    for (auto it = lo; it != hi; ++it) best = std::min(best, std::hypot(it->second.x - t.pixel.x, it->second.y - t.pixel.y));
    if (best <= 5) {
      ++found;
      sq += best * best;
    }
  }
  const double rate = truth_points ? static_cast<double>(found) / truth_points : 0;
  const double rms = found ? std::sqrt(sq / found) : std::numeric_limits<double>::infinity();
  return {rate >= 0.999 && rms <= 1 && secs < 60,
          "rate " + fmt(100 * rate) + "% (need >= 99.9), rms " + fmt(rms) + " px (need <= 1), " + fmt(secs) +
              " s (need < 60), " + std::to_string(s.frames) + " frames x " + std::to_string(s.arenas.size()) +
              " arenas"};
}

Outcome identity_preservation() {
  const Scene s = preset_scene("crossing");
  const fs::path dir = fresh("identity");
  const Project pr = load_project(synthetic_project(dir, s, {}));
  const int ntra = pr.config.integer("kal.ntra");
  RunOptions o;
  o.out_root = (dir / "out").string();
  const RunSummary run = run_project(pr, o);
  check_run(pr, run, g_identities);

  const auto truth = scene_truth(s);
  const int nblobs = static_cast<int>(s.blobs.size());
  // Crossings: occlusion onsets, one per pair of blobs involved.
  std::vector<bool> was(nblobs, false);
  int onsets = 0;
  std::multimap<std::int64_t, const TruthPoint*> at;
  for (const auto& t : truth) {
    if (t.occluded && !was[t.blob]) ++onsets;
    was[t.blob] = t.occluded;
    at.emplace(t.frame, &t);
  }
  const int crossings = onsets / 2;

  const auto& rows = run.sequences.at(0).rows.at(0);
  std::set<std::pair<std::int64_t, int>> seen;
  int violations = 0;
  std::vector<std::pair<int, int>> labelled;  // individual, nearest truth blob
  std::vector<double> confusion(static_cast<std::size_t>(ntra) * nblobs, 0);
  for (const auto& r : rows) {
    if (r.track < 1 || r.track > ntra) continue;
    if (!seen.emplace(r.frame, r.track).second) ++violations;
    auto [lo, hi] = at.equal_range(r.frame);
    double best = std::numeric_limits<double>::infinity();
    int blob = -1;
    for (auto it = lo; it != hi; ++it) {
      const double d = std::hypot(it->second->pixel.x - r.pixel.x, it->second->pixel.y - r.pixel.y);
      if (d < best) best = d, blob = it->second->blob;
    }
    if (blob < 0) continue;
    labelled.emplace_back(r.track, blob);
    confusion[static_cast<std::size_t>(r.track - 1) * nblobs + blob] -= 1;
  }
  // One-to-one individual -> blob mapping maximizing agreement.
  const std::vector<int> map = hungarian_assign(confusion, ntra, nblobs);
  std::int64_t correct = 0;
  for (const auto& [ind, blob] : labelled) correct += map[ind - 1] == blob;
  const double rate = labelled.empty() ? 0 : static_cast<double>(correct) / labelled.size();
  return {crossings >= 30 && rate >= 0.95 && violations == 0,
          std::to_string(crossings) + " crossings (need >= 30), correct identity " + fmt(100 * rate) +
              "% over " + std::to_string(labelled.size()) + " identified rows (need >= 95), " +
              std::to_string(violations) + " exclusivity violations (need 0)"};
}

Outcome throughput() {
  Scene s = preset_scene("hd");
  s.frames = 300;
  SyntheticSource src(s);
  std::vector<Frame> frames;
  for (std::int64_t i = 0; i < s.frames; ++i) frames.push_back(src.frame(i));
  const Config c = default_config();
  const auto arenas = define_arenas_automatic(frames.front(), arena_params(c));
  const int threads = effective_threads(c, std::nullopt);
  const Throughput t = measure_throughput(frames, arenas, pipeline_params(c, true), s.camera, threads);
  const double fps = t.fps();
  std::string detail = fmt(fps) + " frames/s at " + std::to_string(s.width) + "x" + std::to_string(s.height) +
                       ", identification off, " + std::to_string(arenas.size()) + " arena(s), " +
                       std::to_string(threads) + " threads, hardware concurrency " +
                       std::to_string(std::thread::hardware_concurrency());
  if (fps >= 25) return {true, detail + " (target 25)"};
  if (fps >= 15) return {true, detail + " (below the 25 target, above the 15 soft-fail threshold)"};
  return {false, detail + " (below the 15 soft-fail threshold)"};
}

double brute_force_min(const std::vector<double>& cost, int rows, int cols) {
  const int n = std::max(rows, cols);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0;
    for (int r = 0; r < rows; ++r)
      if (perm[r] < cols) s += cost[static_cast<std::size_t>(r) * cols + perm[r]];
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Outcome hungarian_oracle() {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> dim(1, 6), val(0, 99);
  int mismatches = 0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 500; ++trial) {
    const int r = dim(rng), c = dim(rng);
    // Integer costs keep every sum exact in double precision.
    std::vector<double> cost(static_cast<std::size_t>(r) * c);
    for (auto& v : cost) v = trial % 3 == 0 ? val(rng) % 5 : val(rng);
    const auto a = hungarian_assign(cost, r, c);
    std::vector<int> used(c, 0);
    int matched = 0;
    bool valid = static_cast<int>(a.size()) == r;
    for (int x : a)
      if (x >= 0) valid = valid && x < c && ++used[x] == 1, ++matched;
    valid = valid && matched == std::min(r, c);
    if (!valid || assignment_cost(cost, c, a) != brute_force_min(cost, r, c)) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 5,
          std::to_string(mismatches) + " of 500 differ from brute force, " + fmt(secs) + " s (need < 5)"};
}

Outcome kalman_correctness() {
  const KalmanParams p = tracker_params(default_config()).kalman;
  KalmanFilter kf(p);
  kf.init({100, 50});
  double worst_asym = 0, min_eig = std::numeric_limits<double>::infinity(), innovation = 0;
  for (int step = 1; step <= 60; ++step) {
    kf.predict();
    const Eigen::Vector2d v = kf.correct({100 + 3.0 * step, 50 - 1.5 * step});
    if (step >= 20) innovation = std::max(innovation, v.norm());
    const auto& P = kf.covariance();
    worst_asym = std::max(worst_asym, (P - P.transpose()).cwiseAbs().maxCoeff());
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<KalmanFilter::Mat4>(P).eigenvalues().minCoeff());
  }
  return {innovation < 1e-6 && worst_asym <= 1e-12 && min_eig >= -1e-12,
          "max innovation after step 20 " + fmt(innovation) + " (need < 1e-6), max |P - P'| " + fmt(worst_asym) +
              ", min eigenvalue " + fmt(min_eig)};
}

Outcome distortion_round_trip() {
  double worst = 0;
  for (double k1 : {-0.1, -0.05, 0.0, 0.05, 0.1})
    for (double k2 : {-0.1, -0.05, 0.0, 0.05, 0.1}) {
      DistortionCoefficients d;
      d.k1 = k1;
      d.k2 = k2;
      for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
          const Point2d p{-0.6 + 0.15 * i, -0.6 + 0.15 * j};
          const Point2d q = undistort_point(distort_point(p, d), d);
          worst = std::max(worst, std::hypot(q.x - p.x, q.y - p.y));
        }
    }
  const Point2d w = pixel_to_world({100, 95}, CameraModel::manual(10, 9.5));
  const bool manual = w.x == 10 && w.y == 10;
  return {worst < 1e-6 && manual, "max round-trip error " + fmt(worst) +
                                      " normalized units over 25 coefficient pairs (need < 1e-6), manual (100,95) -> (" +
                                      fmt(w.x) + "," + fmt(w.y) + ")"};
}

Outcome gmm_convergence() {
  Scene s;
  s.width = 320;
  s.height = 240;
  s.frames = 2502;
  s.noise = 2;
  s.seed = 11;
  s.arenas = {{{0, 0, 320, 240}, false}};
  SceneBlob obj;
  obj.start = {160, 120};
  obj.major = 15;
  obj.minor = 10;
  obj.first = 1501;
  s.blobs = {obj};
  SyntheticSource src(s);

  // Defaults with the model switched on; a second model learns at 1/T.
  GmmParams defaults = gmm_params(default_config());
  defaults.enabled = true;
  GmmParams adaptive = defaults;
  adaptive.learning_rate = -1;
  BackgroundModel fixed(s.width, s.height, defaults), learning(s.width, s.height, adaptive);

  std::int64_t static_fg = 0, initial = -1, decayed_at = -1;
  const std::int64_t budget = 2 * adaptive.history;
  for (std::int64_t f = 0; f < s.frames; ++f) {
    const Frame img = src.frame(f);
    const BinaryMask a = fixed.apply(img);
    const BinaryMask b = learning.apply(img);
    if (f >= 1000 && f <= 1500) static_fg += std::count(a.bits.begin(), a.bits.end(), 1);
    if (f < 1501) continue;
    const std::int64_t area = std::count(b.bits.begin(), b.bits.end(), 1);
    if (f == 1501) initial = area;
    else if (decayed_at < 0 && area < 0.05 * initial) decayed_at = f - 1501;
  }
  const bool decay_ok = initial > 0 && decayed_at >= 0 && decayed_at <= budget;
  return {static_fg == 0 && decay_ok,
          std::to_string(static_fg) + " foreground pixels on static frames 1000-1500 (need 0), object area " +
              std::to_string(initial) + " px fell below 5% after " +
              (decayed_at >= 0 ? std::to_string(decayed_at) : std::string("never")) + " frames (need <= " +
              std::to_string(budget) + ")"};
}

Outcome analytics_identities() {
  Trajectory line;
  for (int i = 0; i < 250; ++i) line.push_back({i, i / 25.0, {10.0 * i / 25.0, 0}, 1});
  const auto v = instantaneous_speed(line, 2);
  const auto a = instantaneous_accel(v, 2);
  double speed_err = 0, accel = 0;
  for (const auto& x : v) speed_err = std::max(speed_err, std::abs(x.value - 10));
  for (const auto& x : a) accel = std::max(accel, std::abs(x.value));
  const IdentityCheck& ic = g_identities;
  return {ic.regions > 0 && ic.zone_sum <= 1e-9 && ic.visibility_sum <= 1e-12 && speed_err <= 1e-9 && accel <= 1e-9,
          "over " + std::to_string(ic.regions) + " analysed regions: max |sum freq - 1| " + fmt(ic.zone_sum) +
              ", max |vis + invis - 1| " + fmt(ic.visibility_sum) + "; 10 mm/s line: speed error " + fmt(speed_err) +
              ", max |accel| " + fmt(accel)};
}

// Relative path -> content of every file under root.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = read_file(e.path().string());
  return out;
}

bool golden_file(const std::string& rel) {
  return fs::path(rel).extension() == ".txt" && rel.find("_Input.txt") == std::string::npos;
}

std::string golden_tox(const fs::path& dir) {
  return synthetic_project(dir, load_scene(std::string(ARENATRACK_GOLDEN_DIR) + "/scene.txt"), {{"out.ftxt", "2"}});
}

Outcome format_goldens() {
  const fs::path dir = fresh("golden");
  const std::string tox = golden_tox(dir);
  std::string log;
  if (run_cli("run " + tox + " --threads 1 --out " + (dir / "out").string(), &log) != 0)
    return {false, "run failed: " + log};
  const Project pr = load_project(tox);
  RunOptions o;
  o.out_root = (dir / "inproc").string();
  check_run(pr, run_project(pr, o), g_identities);

  const fs::path golden = fs::path(ARENATRACK_GOLDEN_DIR) / "Synthetic";
  std::map<std::string, std::string> produced;
  for (auto& [rel, text] : tree(dir / "out" / "Synthetic"))
    if (golden_file(rel)) produced[rel] = text;
  if (std::getenv("ARENATRACK_UPDATE_GOLDEN")) {
    fs::remove_all(golden);
    for (const auto& [rel, text] : produced) {
      fs::create_directories((golden / rel).parent_path());
      write_file((golden / rel).string(), text);
    }
  }
  const auto frozen = tree(golden);
  if (frozen.empty()) return {false, "no frozen files under " + golden.string()};
  std::vector<std::string> differ;
  for (const auto& [rel, text] : frozen) {
    auto it = produced.find(rel);
    if (it == produced.end() || it->second != text) differ.push_back(rel);
  }
  for (const auto& [rel, text] : produced)
    if (!frozen.count(rel)) differ.push_back(rel + " (not frozen)");
  std::string detail = std::to_string(frozen.size()) + " frozen files, " + std::to_string(differ.size()) + " differ";
  for (std::size_t i = 0; i < differ.size() && i < 5; ++i) detail += (i ? ", " : ": ") + differ[i];
  return {differ.empty(), detail};
}

Outcome determinism() {
  const fs::path dir = fresh("determinism");
  const std::string tox = golden_tox(dir);
  std::map<std::string, std::size_t> hashes[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path out = dir / ("run" + std::to_string(k));
    std::string log;
    if (run_cli("run " + tox + " --out " + out.string(), &log) != 0) return {false, "run failed: " + log};
    for (const auto& [rel, text] : tree(out)) hashes[k][rel] = std::hash<std::string>{}(text);
  }
  std::size_t differ = 0;
  for (const auto& [rel, h] : hashes[0]) {
    auto it = hashes[1].find(rel);
    differ += it == hashes[1].end() || it->second != h;
  }
  differ += hashes[1].size() > hashes[0].size() ? hashes[1].size() - hashes[0].size() : 0;
  return {differ == 0 && !hashes[0].empty(),
          std::to_string(hashes[0].size()) + " files hashed per run, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"detection-rate", detection_rate},
      {"identity-preservation", identity_preservation},
      {"throughput", throughput},
      {"hungarian-oracle", hungarian_oracle},
      {"kalman-correctness", kalman_correctness},
      {"distortion-round-trip", distortion_round_trip},
      {"gmm-convergence", gmm_convergence},
      {"format-goldens", format_goldens},
      {"determinism", determinism},
      // Last, so it covers the regions analysed by the runs above.
      {"analytics-identities", analytics_identities},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome r;
    const auto t0 = Clock::now();
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    failed += !r.pass;
    std::cout << (r.pass ? "PASS " : "FAIL ") << name << ": " << r.detail << " [" << fmt(seconds_since(t0)) << " s]"
              << std::endl;
  }
  fs::remove_all(work_root());
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << "\n";
  return failed ? 1 : 0;
}

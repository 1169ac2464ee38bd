#include <gtest/gtest.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <thread>

#include "arenatrack/errors.hpp"
#include "arenatrack/imaging.hpp"
#include "arenatrack/project.hpp"
#include "arenatrack/service.hpp"
#include "arenatrack/synth.hpp"
#include "arenatrack/text.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace arenatrack;

namespace {

std::string fresh_dir(const std::string& name) {
  const fs::path d = fs::path(testing::TempDir()) / ("arenatrack_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d.string();
}

// Single-blob project over a short synthetic video.
std::string single_blob_project(const std::string& dir, std::int64_t frames) {
  Scene s = preset_scene("single");
  s.frames = frames;
  SyntheticSource src(s);
  write_y8(src, dir + "/synthetic.y8");
  Config c = default_config();
  c.set("out.pnam", "Synthetic");
  SequenceInput seq;
  seq.files = {"synthetic.y8"};
  return write_project(dir, c, {seq}, &s.camera);
}

struct Command {
  int exit_code = -1;
  std::string out;
};

Command run_cli(const std::string& args) {
  Command r;
  const std::string cmd = std::string(ARENATRACK_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

json wait_until_settled(Service& s) {
  for (int i = 0; i < 6000; ++i) {
    const json st = json::parse(s.handle("GET", "/api/run/status", "").body);
    if (st["state"] != "running") return st;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  return json();
}

}  // namespace

TEST(Synth, LinearUniformTruthIsAnalytic) {
  Scene s;
  s.frames = 30;
  s.arenas = {{{0, 0, 640, 480}, false}};
  SceneBlob b;
  b.start = {100, 200};
  b.velocity = {2.5, -1};
  s.blobs = {b};
  const auto truth = scene_truth(s);
  ASSERT_EQ(truth.size(), 30u);
  for (const auto& t : truth) {
    EXPECT_DOUBLE_EQ(t.pixel.x, 100 + 2.5 * t.frame);
    EXPECT_DOUBLE_EQ(t.pixel.y, 200 - 1.0 * t.frame);
    EXPECT_FALSE(t.occluded);
  }
}

TEST(Synth, OcclusionMatchesMaskIntersection) {
  Scene s;
  s.frames = 60;
  s.arenas = {{{0, 0, 640, 480}, false}};
  SceneBlob a, b;
  a.start = {200, 240};
  a.velocity = {2, 0};
  b.start = {320, 240};
  b.velocity = {-2, 0};
  s.blobs = {a, b};
  const auto truth = scene_truth(s);
  for (const auto& t : truth) {
    if (t.blob != 0) continue;
    const BlobState sa = blob_state(s.blobs[0], s, t.frame), sb = blob_state(s.blobs[1], s, t.frame);
    bool overlap = false;
    for (int y = 200; y < 280 && !overlap; ++y)
      for (int x = 150; x < 400 && !overlap; ++x)
        // A blob's mask is the set of pixels it covers by more than half.
        overlap = blob_coverage(s.blobs[0], sa, {double(x), double(y)}) > 0.5 &&
                  blob_coverage(s.blobs[1], sb, {double(x), double(y)}) > 0.5;
    EXPECT_EQ(t.occluded, overlap) << "frame " << t.frame;
  }
}

TEST(Synth, DistortionDisplacesRawCentroid) {
  Scene s;
  s.frames = 1;
  s.arenas = {{{0, 0, 640, 480}, false}};
  s.camera.camera_matrix = {{{600, 0, 320}, {0, 600, 240}, {0, 0, 1}}};
  s.camera.distortion.k1 = 0.1;
  SceneBlob b;
  b.start = {590, 440};
  b.major = 6;
  b.minor = 6;
  s.blobs = {b};
  const Frame raw = render_frame(s, 0);
  const auto blobs = connected_components(threshold_below(raw, 150));
  ASSERT_EQ(blobs.size(), 1u);
  const Point2d expected =
      normalized_to_pixel(distort_point(pixel_to_normalized({590, 440}, s.camera), s.camera.distortion), s.camera);
  EXPECT_GT(std::hypot(expected.x - 590, expected.y - 440), 5.0);
  EXPECT_NEAR(blobs[0].centroid.x, expected.x, 0.5);
  EXPECT_NEAR(blobs[0].centroid.y, expected.y, 0.5);
}

TEST(Synth, SameSeedSameFrames) {
  const Scene s = preset_scene("four-arena", 3);
  EXPECT_EQ(render_frame(s, 17).pixels, render_frame(s, 17).pixels);
  EXPECT_NE(render_frame(s, 17).pixels, render_frame(preset_scene("four-arena", 4), 17).pixels);
}

TEST(Cli, MissingVideoExitsThree) {
  const std::string dir = fresh_dir("cli_missing");
  Config c = default_config();
  SequenceInput seq;
  seq.files = {"absent.y8"};
  const std::string tox = write_project(dir, c, {seq}, nullptr);
  const Command r = run_cli("run " + tox);
  EXPECT_EQ(r.exit_code, 3) << r.out;
  EXPECT_NE(r.out.find("absent.y8"), std::string::npos) << r.out;
}

TEST(Cli, CheckPrintsDefaults) {
  const Command r = run_cli("check");
  EXPECT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(parse_configuration(r.out.substr(0, r.out.find("effective threads"))), default_config());
}

TEST(Cli, SingleBlobRunIsFullyVisible) {
  const std::string dir = fresh_dir("cli_single");
  const std::string tox = single_blob_project(dir, 250);
  const Command r = run_cli("run " + tox);
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const auto lines = split_lines(read_file(dir + "/Synthetic/Seq1/Stats_1.txt"));
  bool found = false;
  for (const auto& l : lines) {
    const auto t = split_ws(l);
    if (t.size() >= 3 && t[0] == "Visibility" && t[1] == "Rate") {
      found = true;
      EXPECT_GE(std::stod(t.back()), 0.999) << l;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Service, ValidationAndConflicts) {
  const std::string dir = fresh_dir("svc_valid");
  Service svc(load_project(single_blob_project(dir, 60)), ServiceOptions{});
  const HttpResponse bad = svc.handle("PUT", "/api/project/config", R"({"parameters": {"kal.advr": "banana"}})");
  EXPECT_EQ(bad.status, 422);
  EXPECT_TRUE(json::parse(bad.body)["errors"].contains("kal.advr")) << bad.body;
  EXPECT_EQ(svc.handle("POST", "/api/run", R"({"out_level": 7})").status, 422);
  EXPECT_EQ(svc.handle("GET", "/api/nowhere", "").status, 404);
  EXPECT_EQ(svc.handle("GET", "/api/results/1/1/Secrets", "").status, 404);
  const HttpResponse frame = svc.handle("GET", "/api/frames/1/0", "");
  EXPECT_EQ(frame.status, 200);
  EXPECT_EQ(frame.content_type, "image/png");
}

TEST(Service, PreviewMatchesTrackingOutput) {
  const std::string dir = fresh_dir("svc_preview");
  const std::string tox = single_blob_project(dir, 80);
  ASSERT_EQ(run_cli("run " + tox).exit_code, 0);
  const auto rows = parse_tracking(read_file(dir + "/Synthetic/Seq1/Tracking_0.txt"), "tracking");
  Service svc(load_project(tox), ServiceOptions{});
  const std::string req = R"({"seq": 1, "frame": 40, "arena": 1})";
  const HttpResponse r = svc.handle("POST", "/api/preview/detect", req);
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(svc.handle("POST", "/api/preview/detect", req).body, r.body);
  const json blobs = json::parse(r.body)["blobs"];
  ASSERT_EQ(blobs.size(), 1u);
  const TrackingRow* row = nullptr;
  for (const auto& x : rows)
    if (x.frame == 40) row = &x;
  ASSERT_NE(row, nullptr);
  EXPECT_NEAR(blobs[0]["centroid"][0].get<double>(), row->pixel.x, 1e-3);
  EXPECT_NEAR(blobs[0]["centroid"][1].get<double>(), row->pixel.y, 1e-3);
}

TEST(Service, StopLeavesNoOutput) {
  const std::string dir = fresh_dir("svc_stop");
  const std::string out = fresh_dir("svc_stop_out");
  ServiceOptions o;
  o.out_root = out;
  Service svc(load_project(single_blob_project(dir, 1500)), o);
  ASSERT_EQ(svc.handle("POST", "/api/run", "{}").status, 202);
  EXPECT_EQ(svc.handle("PUT", "/api/project/config", R"({"parameters": {}})").status, 409);
  EXPECT_EQ(svc.handle("POST", "/api/run", "{}").status, 409);
  EXPECT_EQ(svc.handle("POST", "/api/run/stop", "").status, 202);
  const json st = wait_until_settled(svc);
  EXPECT_EQ(st["state"], "stopped") << st.dump();
  EXPECT_TRUE(fs::is_empty(out));
}

TEST(Service, StatusProgressIsMonotonePerStage) {
  const std::string dir = fresh_dir("svc_progress");
  const std::string out = fresh_dir("svc_progress_out");
  ServiceOptions o;
  o.out_root = out;
  Service svc(load_project(single_blob_project(dir, 400)), o);
  ASSERT_EQ(svc.handle("POST", "/api/run", "{}").status, 202);
  std::string stage;
  double last = -1;
  for (int i = 0; i < 6000; ++i) {
    const json st = json::parse(svc.handle("GET", "/api/run/status", "").body);
    if (st["state"] != "running") {
      EXPECT_EQ(st["state"], "done") << st.dump();
      break;
    }
    const std::string key = st["stage"].get<std::string>() + "/" + std::to_string(st["sequence"].get<int>());
    const double pct = st["percent"].get<double>();
    if (key == stage) EXPECT_GE(pct, last) << key;
    stage = key;
    last = pct;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  EXPECT_EQ(svc.handle("GET", "/api/results/1/1/Stats", "").status, 200);
}

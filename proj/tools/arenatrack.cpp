#include <CLI11.hpp>

#include <cmath>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <thread>

#include "arenatrack/errors.hpp"
#include "arenatrack/pipeline.hpp"
#include "arenatrack/project.hpp"
#include "arenatrack/service.hpp"
#include "arenatrack/synth.hpp"
#include "arenatrack/text.hpp"

namespace fs = std::filesystem;
using namespace arenatrack;

namespace {

// Prints a line whenever the stage changes or another 10% completes.
ProgressFn stderr_progress() {
  auto last = std::make_shared<std::pair<std::string, int>>("", -1);
  return [last](const Progress& p) {
    const std::string key = p.stage + "/" + std::to_string(p.sequence);
    const int decile = static_cast<int>(std::floor(p.percent / 10));
    if (key == last->first && decile == last->second) return;
    *last = {key, decile};
    std::cerr << "[" << p.stage << "] sequence " << p.sequence << ": " << format_number(std::round(p.percent))
              << "%\n";
  };
}

void report(const RunSummary& s) {
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "output: " << s.output_dir << "\n"
            << "frames: " << s.frames << "\n"
            << "tracks: " << s.tracks << "\n"
            << "tracking time (s): " << format_number(s.tracking_seconds) << "\n";
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const ProcessingError& e) {
    std::cerr << "processing error: " << e.what() << "\n";
    return 4;
  } catch (const StoppedError& e) {
    std::cerr << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

struct RunArgs {
  std::string project;
  std::optional<double> start_min, end_min;
  std::optional<int> threads, out_level;
  bool no_identity = false;
  std::string out_root;

  RunOptions options() const {
    RunOptions o;
    o.start_min = start_min;
    o.end_min = end_min;
    o.threads = threads;
    o.out_level = out_level;
    o.no_identity = no_identity;
    o.out_root = out_root;
    o.progress = stderr_progress();
    return o;
  }
};

void add_run_flags(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("project", a.project, "project file (.tox)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--start-min", a.start_min, "analysis start, minutes (overrides oth.mini)");
  cmd->add_option("--end-min", a.end_min, "analysis end, minutes (overrides oth.mend)");
  cmd->add_option("--threads", a.threads, "worker threads (overrides ARENATRACK_THREADS and exe.thre)")
      ->check(CLI::Range(1, 1024));
  cmd->add_flag("--no-identity", a.no_identity, "skip feature extraction and identification");
  cmd->add_option("--out-level", a.out_level, "text output level 0-2 (overrides out.ftxt)")->check(CLI::Range(0, 2));
  cmd->add_option("--out", a.out_root, "directory receiving the output folder (default: project directory)");
}

struct SynthArgs {
  std::string preset, scene_file, video, truth, scene_out, project_dir;
  std::uint64_t seed = 0;
  std::int64_t frames = 0;
};

int do_synth(const SynthArgs& a) {
  if (a.preset.empty() == a.scene_file.empty()) throw ConfigError("give exactly one of --preset or --scene");
  Scene scene = a.preset.empty() ? load_scene(a.scene_file) : preset_scene(a.preset, a.seed);
  if (a.frames > 0) scene.frames = a.frames;
  scene.validate();
  std::string video = a.video;
  if (video.empty()) {
    if (a.project_dir.empty()) throw ConfigError("give --video or --project");
    video = (fs::path(a.project_dir) / "synthetic.y8").string();
  }
  if (fs::path(video).has_parent_path()) fs::create_directories(fs::path(video).parent_path());
  SyntheticSource src(scene);
  write_y8(src, video);
  std::cout << "video: " << video << " (" << scene.frames << " frames, " << scene.width << "x" << scene.height
            << ")\n";
  if (!a.truth.empty()) {
    write_file(a.truth, format_truth(scene, scene_truth(scene)));
    std::cout << "truth: " << a.truth << "\n";
  }
  if (!a.scene_out.empty()) {
    write_file(a.scene_out, format_scene(scene));
    std::cout << "scene: " << a.scene_out << "\n";
  }
  if (!a.project_dir.empty()) {
    Config c = default_config();
    c.set("out.pnam", "Synthetic");
    c.set("oth.frat", format_number(scene.fps));
    const std::size_t per_arena = std::max<std::size_t>(1, scene.blobs.size() / scene.arenas.size());
    c.set("kal.ntra", std::to_string(per_arena));
    if (per_arena > 1) c.set("kal.idal", "1");
    SequenceInput seq;
    seq.files = {fs::relative(fs::absolute(video), fs::absolute(a.project_dir)).string()};
    const std::string tox = write_project(a.project_dir, c, {seq}, &scene.camera);
    std::cout << "project: " << tox << "\n";
  }
  return 0;
}

int do_check(const std::string& path) {
  Config c = default_config();
  if (!path.empty()) {
    if (fs::path(path).extension() == ".tox") {
      const Project pr = load_project(path);
      c = pr.config;
      for (std::size_t i = 0; i < pr.sequences.size(); ++i) {
        auto src = open_sequence(pr.sequences[i], c.real("oth.frat"));
        std::cerr << "sequence " << i + 1 << ": " << src->count() << " frames, " << src->width() << "x"
                  << src->height() << " at " << format_number(src->fps()) << " fps\n";
      }
    } else {
      c = load_configuration(path);
    }
  }
  pipeline_params(c, false);
  std::cout << c.write();
  std::cerr << "effective threads: " << effective_threads(c, std::nullopt) << "\n";
  return 0;
}

int do_bench(std::int64_t frames, std::optional<int> threads, bool identity) {
  Scene scene = preset_scene("hd");
  scene.frames = frames;
  SyntheticSource src(scene);
  std::vector<Frame> buf;
  buf.reserve(static_cast<std::size_t>(frames));
  for (std::int64_t i = 0; i < frames; ++i) buf.push_back(src.frame(i));
  const Config c = default_config();
  const auto arenas = define_arenas_automatic(buf.front(), arena_params(c));
  const int t = effective_threads(c, threads);
  const Throughput r = measure_throughput(buf, arenas, pipeline_params(c, !identity), scene.camera, t);
  std::cout << "frames/s: " << format_number(r.fps()) << "\n"
            << "frames: " << r.frames << " at " << scene.width << "x" << scene.height << ", " << arenas.size()
            << " arena(s)\n"
            << "seconds: " << format_number(r.seconds) << "\n"
            << "threads: " << t << " (hardware concurrency " << std::thread::hardware_concurrency() << ")\n"
            << "identification: " << (identity ? "on" : "off") << "\n";
  return 0;
}

Service* g_service = nullptr;
void on_signal(int) {
  if (g_service) g_service->stop_listening();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arenatrack: multi-arena organism tracking"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "track, identify, analyse and write outputs for a project");
  add_run_flags(run, run_args);

  RunArgs render_args;
  auto* render = app.add_subcommand("render", "recompute analytics and images from existing Tracking files");
  render->add_option("project", render_args.project, "project file (.tox)")->required()->check(CLI::ExistingFile);
  render->add_option("--out-level", render_args.out_level, "text output level 0-2")->check(CLI::Range(0, 2));
  render->add_option("--out", render_args.out_root, "directory holding the output folder");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic scene video with ground truth");
  synth->add_option("--preset", synth_args.preset, "built-in scene")->check(CLI::IsMember(preset_names()));
  synth->add_option("--scene", synth_args.scene_file, "scene file")->check(CLI::ExistingFile);
  synth->add_option("--seed", synth_args.seed, "noise seed for presets");
  synth->add_option("--frames", synth_args.frames, "override the frame count");
  synth->add_option("--video", synth_args.video, "output .y8 video");
  synth->add_option("--truth", synth_args.truth, "ground truth in the Tracking_RealSpace layout");
  synth->add_option("--scene-out", synth_args.scene_out, "write the effective scene file");
  synth->add_option("--project", synth_args.project_dir, "write a project around the video into this directory");

  std::string check_path;
  auto* check = app.add_subcommand("check", "validate a project or configuration and print effective values");
  check->add_option("path", check_path, "project (.tox) or Configuration file; omitted prints defaults");

  std::int64_t bench_frames = 200;
  std::optional<int> bench_threads;
  bool bench_identity = false;
  auto* bench = app.add_subcommand("bench", "per-frame throughput on 1280x720 synthetic frames");
  bench->add_option("--frames", bench_frames, "frames to process")->check(CLI::Range(2, 100000));
  bench->add_option("--threads", bench_threads, "worker threads")->check(CLI::Range(1, 1024));
  bench->add_flag("--identity", bench_identity, "include feature extraction and identification");

  std::string serve_project;
  ServiceOptions serve_opts;
  auto* serve = app.add_subcommand("serve", "local HTTP service for the tuning interface");
  serve->add_option("project", serve_project, "project file (.tox)")->required()->check(CLI::ExistingFile);
  serve->add_option("--host", serve_opts.host, "bind address (default loopback)");
  serve->add_option("--port", serve_opts.port, "port")->check(CLI::Range(1, 65535));
  serve->add_option("--out", serve_opts.out_root, "directory receiving run outputs");

  CLI11_PARSE(app, argc, argv);

  if (*run)
    return guarded([&] {
      const RunSummary s = run_project(load_project(run_args.project), run_args.options());
      report(s);
      return 0;
    });
  if (*render)
    return guarded([&] {
      const RunSummary s = render_project(load_project(render_args.project), render_args.options());
      report(s);
      return 0;
    });
  if (*synth) return guarded([&] { return do_synth(synth_args); });
  if (*check) return guarded([&] { return do_check(check_path); });
  if (*bench) return guarded([&] { return do_bench(bench_frames, bench_threads, bench_identity); });
  if (*serve)
    return guarded([&] {
      Service service(load_project(serve_project), serve_opts);
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << serve_opts.host << ":" << serve_opts.port << "/api\n";
      if (!service.listen()) throw IoError("cannot bind " + serve_opts.host + ":" + std::to_string(serve_opts.port));
      g_service = nullptr;
      return 0;
    });
  return 1;
}

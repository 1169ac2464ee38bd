#include "arenatrack/service.hpp"

#include <httplib.h>

#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <json.hpp>
#include <regex>

#include "arenatrack/errors.hpp"
#include "arenatrack/image_io.hpp"
#include "arenatrack/imaging.hpp"
#include "arenatrack/text.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace arenatrack {

namespace {

HttpResponse json_response(int status, const json& j) { return {status, "application/json", j.dump()}; }
HttpResponse error_response(int status, const std::string& msg) { return json_response(status, {{"error", msg}}); }

// Field-level validation failure.
struct InvalidFields {
  json errors = json::object();
};

std::string value_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : " ") + value_text(e);
    return s;
  }
  throw ConfigError("unsupported value type");
}

// Applies {"code": value} overrides, collecting every invalid field.
Config apply_params(const Config& base, const json& params) {
  Config c = base;
  if (params.is_null()) return c;
  if (!params.is_object()) {
    InvalidFields e;
    e.errors["params"] = "expected an object of parameter codes";
    throw e;
  }
  InvalidFields bad;
  for (const auto& [code, v] : params.items()) {
    try {
      c.set(code, value_text(v));
    } catch (const std::exception& ex) {
      bad.errors[code] = ex.what();
    }
  }
  if (!bad.errors.empty()) throw bad;
  return c;
}

std::vector<Rect> parse_rects(const json& j) {
  std::vector<Rect> out;
  InvalidFields bad;
  if (!j.is_array()) {
    bad.errors["rects"] = "expected an array of [x0, y0, x1, y1]";
    throw bad;
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& r = j[i];
    if (!r.is_array() || r.size() != 4 || !std::all_of(r.begin(), r.end(), [](const json& v) { return v.is_number_integer(); })) {
      bad.errors["rects[" + std::to_string(i) + "]"] = "expected four integers x0 y0 x1 y1";
      continue;
    }
    Rect q{r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()};
    if (q.empty()) bad.errors["rects[" + std::to_string(i) + "]"] = "empty rectangle";
    out.push_back(q);
  }
  if (!bad.errors.empty()) throw bad;
  return out;
}

json rect_json(const Rect& r) { return json::array({r.x0, r.y0, r.x1, r.y1}); }

// Runs of set pixels as [offset, length] pairs over the row-major mask.
json rle(const BinaryMask& m) {
  json runs = json::array();
  const std::size_t n = m.bits.size();
  std::size_t i = 0;
  while (i < n) {
    if (!m.bits[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && m.bits[j]) ++j;
    runs.push_back(i);
    runs.push_back(j - i);
    i = j;
  }
  return {{"width", m.width}, {"height", m.height}, {"runs", runs}};
}

json optional_number(double v, bool present) { return present ? json(v) : json(nullptr); }

}  // namespace

struct Service::Impl {
  Project project;
  ServiceOptions options;
  httplib::Server server;

  std::mutex mu;  // guards project and run state
  std::thread runner;
  std::atomic<bool> stop_flag{false};
  std::string state = "idle";  // idle, running, done, stopped, failed
  Progress progress;
  std::string message;
  std::string output_dir;

  bool running() const { return state == "running"; }

  std::string results_root() const {
    return (fs::path(options.out_root.empty() ? project.base_dir : options.out_root) / project.name()).string();
  }

  int sequence_arg(const json& body) {
    const int seq = body.value("seq", 1);
    if (seq < 1 || seq > static_cast<int>(project.sequences.size())) {
      InvalidFields bad;
      bad.errors["seq"] = "sequence out of range 1.." + std::to_string(project.sequences.size());
      throw bad;
    }
    return seq;
  }

  Frame undistorted(const Project& pr, ConcatSource& src, std::int64_t index) {
    if (index < 0 || index >= src.count()) {
      InvalidFields bad;
      bad.errors["frame"] = "frame out of range 0.." + std::to_string(src.count() - 1);
      throw bad;
    }
    const Frame raw = src.frame(index);
    if (is_identity_map(pr.camera)) return raw;
    return undistort_frame(raw, build_undistortion_map(pr.camera, raw.width, raw.height));
  }

  Frame reference(const Project& pr, int seq, ConcatSource& src) {
    const SequenceInput& in = pr.sequences[seq - 1];
    return undistorted(pr, src, src.global_index(in.ref_video, in.ref_frame));
  }

  HttpResponse get_frame(int seq, std::int64_t index) {
    Project pr;
    {
      std::lock_guard<std::mutex> lk(mu);
      pr = project;
    }
    if (seq < 1 || seq > static_cast<int>(pr.sequences.size())) return error_response(404, "no such sequence");
    auto src = open_sequence(pr.sequences[seq - 1], pr.config.real("oth.frat"));
    if (index < 0 || index >= src->count()) return error_response(404, "no such frame");
    const Frame f = undistorted(pr, *src, index);
    const auto png = encode_png(f);
    return {200, "image/png", std::string(png.begin(), png.end())};
  }

  HttpResponse preview_arenas(const json& body) {
    Project pr;
    {
      std::lock_guard<std::mutex> lk(mu);
      pr = project;
    }
    const int seq = sequence_arg(body);
    pr.config = apply_params(pr.config, body.value("params", json()));
    if (body.contains("mode")) pr.config = apply_params(pr.config, {{"roi.mode", body["mode"]}});
    if (body.contains("rects")) pr.arena_rects = parse_rects(body["rects"]);
    if (body.contains("names")) pr.arena_names = body["names"].get<std::vector<std::string>>();
    auto src = open_sequence(pr.sequences[seq - 1], pr.config.real("oth.frat"));
    const Frame ref = reference(pr, seq, *src);
    std::vector<std::string> warnings;
    json arenas = json::array();
    try {
      for (const Arena& a : sequence_arenas(ref, pr, &warnings))
        arenas.push_back({{"name", a.name}, {"rect", rect_json(a.rect)}, {"mask", rle(a.area.mask)}});
    } catch (const ProcessingError& e) {
      warnings.push_back(e.what());
    }
    return json_response(200, {{"arenas", arenas}, {"warnings", warnings}});
  }

  HttpResponse preview_detect(const json& body) {
    Project pr;
    {
      std::lock_guard<std::mutex> lk(mu);
      pr = project;
    }
    const int seq = sequence_arg(body);
    pr.config = apply_params(pr.config, body.value("params", json()));
    const PipelineParams pp = pipeline_params(pr.config, true);
    auto src = open_sequence(pr.sequences[seq - 1], pr.config.real("oth.frat"));
    const std::int64_t index = body.value("frame", std::int64_t{0});
    std::vector<std::string> warnings;
    const auto arenas = sequence_arenas(reference(pr, seq, *src), pr, &warnings);
    const int arena = body.value("arena", 1);
    if (arena < 1 || arena > static_cast<int>(arenas.size())) {
      InvalidFields bad;
      bad.errors["arena"] = "arena out of range 1.." + std::to_string(arenas.size());
      throw bad;
    }
    const Arena& a = arenas[arena - 1];
    const int warmup = body.value("warmup", 0);
    BinaryMask fg(a.rect.width(), a.rect.height(), true);
    if (warmup > 0 && pp.gmm.enabled) {
      BackgroundModel bg(a.rect.width(), a.rect.height(), pp.gmm);
      for (std::int64_t f = std::max<std::int64_t>(0, index - warmup); f < index; ++f)
        bg.apply(crop(normalize_and_blur(undistorted(pr, *src, f), pp.gfil, pp.normalize), a.rect));
      fg = bg.apply(crop(normalize_and_blur(undistorted(pr, *src, index), pp.gfil, pp.normalize), a.rect));
    }
    Frame local = crop(normalize_and_blur(undistorted(pr, *src, index), pp.gfil, pp.normalize), a.rect);
    local.index = index;
    const auto cands = segment(local, a, fg, pp.det);
    json blobs = json::array();
    double sum = 0, sum2 = 0;
    int passed = 0;
    for (const auto& c : cands) {
      const Blob& b = c.blob;
      blobs.push_back({{"centroid", {b.centroid.x + a.rect.x0, b.centroid.y + a.rect.y0}},
                       {"size", b.area},
                       {"radius", b.enclosing.radius},
                       {"axis_ratio", axis_ratio(b)},
                       {"fill_rate", fill_rate(b)},
                       {"passed", c.passed}});
      if (c.passed) {
        ++passed;
        sum += static_cast<double>(b.area);
        sum2 += static_cast<double>(b.area) * static_cast<double>(b.area);
      }
    }
    const double mean = passed ? sum / passed : 0;
    const double var = passed ? std::max(0.0, sum2 / passed - mean * mean) : 0;
    return json_response(200, {{"blobs", blobs},
                               {"unfiltered", cands.size()},
                               {"filtered", passed},
                               {"size_mean", optional_number(mean, passed > 0)},
                               {"size_stddev", optional_number(std::sqrt(var), passed > 0)},
                               {"warnings", warnings}});
  }

  json config_document() {
    json params = json::array();
    for (const ParamSpec& s : project.config.registry())
      params.push_back({{"section", s.section},
                        {"code", s.code},
                        {"value", project.config.raw(s.code)},
                        {"default", s.default_value},
                        {"min", s.lo},
                        {"max", s.hi},
                        {"help", s.help}});
    json rects = json::array();
    for (const Rect& r : project.arena_rects) rects.push_back(rect_json(r));
    return {{"project", project.name()}, {"parameters", params}, {"arena_rects", rects},
            {"arena_names", project.arena_names}};
  }

  HttpResponse put_config(const json& body) {
    std::lock_guard<std::mutex> lk(mu);
    if (running()) return error_response(409, "a run is active");
    Project pr = project;
    pr.config = apply_params(pr.config, body.value("parameters", json()));
    if (body.contains("arena_rects")) pr.arena_rects = parse_rects(body["arena_rects"]);
    if (body.contains("arena_names")) {
      if (!body["arena_names"].is_array()) {
        InvalidFields bad;
        bad.errors["arena_names"] = "expected an array of names";
        throw bad;
      }
      pr.arena_names = body["arena_names"].get<std::vector<std::string>>();
    }
    write_file(pr.paths.configuration, pr.config.write());
    save_arena_rects(pr.arena_rects, pr.paths.arena);
    if (!pr.arena_names.empty()) save_arena_names(pr.arena_names, pr.paths.arena_names);
    project = std::move(pr);
    return json_response(200, config_document());
  }

  HttpResponse start_run(const json& body) {
    std::lock_guard<std::mutex> lk(mu);
    if (running()) return error_response(409, "a run is active");
    RunOptions o;
    InvalidFields bad;
    if (body.contains("start_min")) o.start_min = body["start_min"].get<double>();
    if (body.contains("end_min")) o.end_min = body["end_min"].get<double>();
    if (body.contains("threads")) o.threads = body["threads"].get<int>();
    if (body.contains("out_level")) {
      const int lvl = body["out_level"].get<int>();
      if (lvl < 0 || lvl > 2) bad.errors["out_level"] = "must be 0, 1 or 2";
      o.out_level = lvl;
    }
    o.no_identity = body.value("no_identity", false);
    if (!bad.errors.empty()) throw bad;
    o.out_root = options.out_root;
    stop_flag = false;
    o.stop = &stop_flag;
    o.progress = [this](const Progress& p) {
      std::lock_guard<std::mutex> g(mu);
      progress = p;
    };
    if (runner.joinable()) runner.join();
    state = "running";
    message.clear();
    progress = {"tracking", 1, 0};
    Project pr = project;
    runner = std::thread([this, pr, o] {
      std::string st, msg, dir;
      try {
        const RunSummary s = run_project(pr, o);
        st = "done";
        dir = s.output_dir;
        for (const auto& w : s.warnings) msg += (msg.empty() ? "" : "; ") + w;
      } catch (const StoppedError&) {
        st = "stopped";
      } catch (const std::exception& e) {
        st = "failed";
        msg = e.what();
      }
      std::lock_guard<std::mutex> g(mu);
      state = st;
      message = msg;
      output_dir = dir;
    });
    return json_response(202, {{"state", "running"}});
  }

  HttpResponse status() {
    std::lock_guard<std::mutex> lk(mu);
    return json_response(200, {{"state", state},
                               {"stage", progress.stage},
                               {"sequence", progress.sequence},
                               {"percent", progress.percent},
                               {"message", message},
                               {"output_dir", output_dir}});
  }

  HttpResponse stop_run() {
    std::lock_guard<std::mutex> lk(mu);
    if (!running()) return error_response(409, "no run is active");
    stop_flag = true;
    return json_response(202, {{"state", "stopping"}});
  }

  HttpResponse result_file(const std::string& seq, const std::string& arena, const std::string& metric) {
    static const std::set<std::string> metrics = {"Tracking",      "Tracking_RealSpace", "Instant_Speed",
                                                  "Instant_Accel", "Dist_Edges",         "Dist_MeanPos",
                                                  "Dist_CenterPos", "Exploration",       "Transitions",
                                                  "FrozenEvents",  "Stats"};
    if (!metrics.count(metric)) return error_response(404, "unknown metric " + metric);
    fs::path file;
    std::string root;
    {
      std::lock_guard<std::mutex> lk(mu);
      root = results_root();
    }
    const int s = std::stoi(seq), a = std::stoi(arena);
    if (s == 0) {
      if (metric == "Tracking") return error_response(404, "the population has no Tracking file");
      file = fs::path(root) / (metric + ".txt");
    } else if (metric == "Tracking") {
      file = fs::path(root) / ("Seq" + seq) / ("Tracking_" + std::to_string(a - 1) + ".txt");
    } else {
      file = fs::path(root) / ("Seq" + seq) / (metric + "_" + arena + ".txt");
    }
    if (!fs::exists(file)) return error_response(404, "not found: " + file.filename().string());
    return {200, "text/plain; charset=utf-8", read_file(file.string())};
  }

  HttpResponse result_image(const std::string& seq, const std::string& name) {
    std::string root;
    {
      std::lock_guard<std::mutex> lk(mu);
      root = results_root();
    }
    const fs::path file = seq == "0" ? fs::path(root) / name : fs::path(root) / ("Seq" + seq) / name;
    if (!fs::exists(file)) return error_response(404, "not found: " + name);
    const bool jpeg = name.size() > 4 && name.substr(name.size() - 4) == ".jpg";
    return {200, jpeg ? "image/jpeg" : "image/png", read_file(file.string())};
  }

  HttpResponse route(const std::string& method, const std::string& path, const std::string& body_text) {
    static const std::regex frame_re(R"(^/api/frames/(\d+)/(\d+)$)");
    static const std::regex result_re(R"(^/api/results/(\d+)/(\d+)/([A-Za-z_]+)$)");
    static const std::regex image_re(R"(^/api/results/images/(\d+)/([A-Za-z_]+(?:_\d+)?\.(?:png|jpg))$)");
    std::smatch m;
    json body = json::object();
    if (!body_text.empty()) {
      body = json::parse(body_text, nullptr, false);
      if (body.is_discarded()) return error_response(400, "request body is not valid JSON");
      if (!body.is_object()) return error_response(400, "request body must be a JSON object");
    }
    if (method == "GET" && std::regex_match(path, m, frame_re))
      return get_frame(std::stoi(m[1].str()), std::stoll(m[2].str()));
    if (method == "POST" && path == "/api/preview/arenas") return preview_arenas(body);
    if (method == "POST" && path == "/api/preview/detect") return preview_detect(body);
    if (path == "/api/project/config") {
      if (method == "GET") {
        std::lock_guard<std::mutex> lk(mu);
        return json_response(200, config_document());
      }
      if (method == "PUT") return put_config(body);
    }
    if (method == "POST" && path == "/api/run") return start_run(body);
    if (method == "GET" && path == "/api/run/status") return status();
    if (method == "POST" && path == "/api/run/stop") return stop_run();
    if (method == "GET" && std::regex_match(path, m, image_re)) return result_image(m[1].str(), m[2].str());
    if (method == "GET" && std::regex_match(path, m, result_re))
      return result_file(m[1].str(), m[2].str(), m[3].str());
    return error_response(404, "no route for " + method + " " + path);
  }
};

Service::Service(Project project, ServiceOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->project = std::move(project);
  impl_->options = std::move(options);
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type.c_str());
  };
  impl_->server.Get(R"(/api/.*)", handler);
  impl_->server.Post(R"(/api/.*)", handler);
  impl_->server.Put(R"(/api/.*)", handler);
}

Service::~Service() {
  impl_->stop_flag = true;
  wait_for_run();
}

HttpResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  try {
    return impl_->route(method, path, body);
  } catch (const InvalidFields& e) {
    return json_response(422, {{"errors", e.errors}});
  } catch (const ConfigError& e) {
    return json_response(422, {{"errors", {{"config", e.what()}}}});
  } catch (const json::exception& e) {
    return json_response(422, {{"errors", {{"body", e.what()}}}});
  } catch (const IoError& e) {
    return error_response(404, e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

bool Service::listen() { return impl_->server.listen(impl_->options.host, impl_->options.port); }

void Service::stop_listening() { impl_->server.stop(); }

void Service::wait_for_run() {
  if (impl_->runner.joinable()) impl_->runner.join();
}

}  // namespace arenatrack

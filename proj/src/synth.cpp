#include "arenatrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "arenatrack/config.hpp"
#include "arenatrack/errors.hpp"
#include "arenatrack/kernels.hpp"
#include "arenatrack/text.hpp"

namespace arenatrack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr ParamKind I = ParamKind::Integer;
constexpr ParamKind R = ParamKind::Real;

const std::vector<ParamSpec> kSceneSpec = {
    {"SCENE", "scn.wdth", "640", I, 16, 8192, "frame width"},
    {"SCENE", "scn.hght", "480", I, 16, 8192, "frame height"},
    {"SCENE", "scn.nfrm", "250", I, 1, 1e9, "frame count"},
    {"SCENE", "scn.frat", "25", R, 0.001, kInf, "frame rate"},
    {"SCENE", "scn.seed", "0", I, 0, 9e15, "noise seed"},
    {"SCENE", "scn.nois", "0", R, 0, 100, "noise standard deviation"},
    {"SCENE", "scn.bgnd", "230", I, 0, 255, "arena intensity"},
    {"SCENE", "scn.outs", "40", I, 0, 255, "intensity outside arenas"},
    {"SCENE", "scn.fx", "10", R, 1e-9, kInf, "pixels per unit, x"},
    {"SCENE", "scn.fy", "10", R, 1e-9, kInf, "pixels per unit, y"},
    {"SCENE", "scn.cx", "0", R, -kInf, kInf, "principal point x"},
    {"SCENE", "scn.cy", "0", R, -kInf, kInf, "principal point y"},
    {"SCENE", "scn.k1", "0", R, -1, 1, "radial k1"},
    {"SCENE", "scn.k2", "0", R, -1, 1, "radial k2"},
    {"SCENE", "scn.k3", "0", R, -1, 1, "radial k3"},
    {"SCENE", "scn.p1", "0", R, -1, 1, "tangential p1"},
    {"SCENE", "scn.p2", "0", R, -1, 1, "tangential p2"},
};

const std::vector<ParamSpec> kArenaSpec = {
    {"ARENA", "are.x0", "0", I, 0, 8192, "left"},
    {"ARENA", "are.y0", "0", I, 0, 8192, "top"},
    {"ARENA", "are.x1", "1", I, 1, 8192, "right (exclusive)"},
    {"ARENA", "are.y1", "1", I, 1, 8192, "bottom (exclusive)"},
    {"ARENA", "are.circ", "0", I, 0, 1, "inscribed ellipse instead of rectangle"},
};

const std::vector<ParamSpec> kBlobSpec = {
    {"BLOB", "blb.aren", "0", I, 0, 1000, "arena index"},
    {"BLOB", "blb.path", "0", I, 0, 2, "0 linear, 1 circular, 2 bounce"},
    {"BLOB", "blb.x0", "0", R, -kInf, kInf, "start x"},
    {"BLOB", "blb.y0", "0", R, -kInf, kInf, "start y"},
    {"BLOB", "blb.vx", "0", R, -kInf, kInf, "velocity x per frame"},
    {"BLOB", "blb.vy", "0", R, -kInf, kInf, "velocity y per frame"},
    {"BLOB", "blb.cx", "0", R, -kInf, kInf, "circle center x"},
    {"BLOB", "blb.cy", "0", R, -kInf, kInf, "circle center y"},
    {"BLOB", "blb.radi", "0", R, 0, kInf, "circle radius"},
    {"BLOB", "blb.omeg", "0", R, -kInf, kInf, "angular speed per frame"},
    {"BLOB", "blb.phas", "0", R, -kInf, kInf, "initial angle"},
    {"BLOB", "blb.majr", "12", R, 0.5, 1000, "major semi-axis"},
    {"BLOB", "blb.minr", "6", R, 0.5, 1000, "minor semi-axis"},
    {"BLOB", "blb.inte", "40", I, 0, 255, "base intensity"},
    {"BLOB", "blb.text", "0", I, 0, 5, "0 uniform, 1 stripes, 2 checker, 3 gradient, 4 rings, 5 spots"},
    {"BLOB", "blb.tamp", "0", I, 0, 255, "texture amplitude"},
    {"BLOB", "blb.tper", "6", R, 0.5, 1000, "texture period"},
    {"BLOB", "blb.frst", "0", I, 0, 1e9, "first visible frame"},
    {"BLOB", "blb.last", "-1", I, -1, 1e9, "last visible frame (-1 = end)"},
};

std::uint64_t splitmix(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::size_t kNoiseBits = 20;
constexpr std::size_t kNoiseMask = (std::size_t{1} << kNoiseBits) - 1;

// Standard normal samples via Box-Muller over a splitmix stream.
std::vector<float> noise_table(std::uint64_t seed) {
  std::vector<float> t(kNoiseMask + 1);
  std::uint64_t s = seed * 0x2545F4914F6CDD1Dull + 1;
  for (std::size_t i = 0; i < t.size(); i += 2) {
    const double u1 = (static_cast<double>(splitmix(s) >> 11) + 1.0) / 9007199254740993.0;
    const double u2 = static_cast<double>(splitmix(s) >> 11) / 9007199254740992.0;
    const double r = std::sqrt(-2.0 * std::log(u1));
    t[i] = static_cast<float>(r * std::cos(2 * std::numbers::pi * u2));
    t[i + 1] = static_cast<float>(r * std::sin(2 * std::numbers::pi * u2));
  }
  return t;
}

double reflect(double x, double lo, double hi, double* dir) {
  const double L = hi - lo;
  if (L <= 0) {
    *dir = 0;
    return lo;
  }
  double u = std::fmod(x - lo, 2 * L);
  if (u < 0) u += 2 * L;
  if (u <= L) {
    *dir = 1;
    return lo + u;
  }
  *dir = -1;
  return lo + 2 * L - u;
}

double texture_value(const SceneBlob& b, double u, double v) {
  const double A = b.amplitude, T = b.period;
  double val = b.intensity;
  switch (b.texture) {
    case Texture::Uniform:
      break;
    case Texture::Stripes:
      val += std::sin(2 * std::numbers::pi * u / T) >= 0 ? A : -A;
      break;
    case Texture::Checker:
      val += (static_cast<long long>(std::floor(u / T) + std::floor(v / T)) & 1) ? A : -A;
      break;
    case Texture::Gradient:
      val += A * u / b.major;
      break;
    case Texture::Rings:
      val += A * std::cos(2 * std::numbers::pi * std::hypot(u, v) / T);
      break;
    case Texture::Spots:
      val += std::cos(2 * std::numbers::pi * u / T) * std::cos(2 * std::numbers::pi * v / T) > 0.5 ? A : -A;
      break;
  }
  return std::clamp(val, 0.0, 255.0);
}

bool inside_arena(const SceneArena& a, double x, double y) {
  if (!a.rect.contains(static_cast<int>(std::floor(x)), static_cast<int>(std::floor(y)))) return false;
  if (!a.circular) return true;
  const double cx = (a.rect.x0 + a.rect.x1) / 2.0, cy = (a.rect.y0 + a.rect.y1) / 2.0;
  const double rx = (a.rect.x1 - a.rect.x0) / 2.0, ry = (a.rect.y1 - a.rect.y0) / 2.0;
  const double dx = (x - cx) / rx, dy = (y - cy) / ry;
  return dx * dx + dy * dy <= 1.0;
}

Scene scene_from_sections(const std::vector<KeyValueSection>& sections, const std::string& origin) {
  Scene s;
  bool have_scene = false;
  for (const auto& sec : sections) {
    const std::vector<ParamSpec>* reg = nullptr;
    if (sec.name == "SCENE") reg = &kSceneSpec;
    if (sec.name == "ARENA") reg = &kArenaSpec;
    if (sec.name == "BLOB") reg = &kBlobSpec;
    if (!reg)
      throw ConfigError(origin + ":" + std::to_string(sec.line) + ": unknown section '" + sec.name +
                        "' (expected SCENE, ARENA or BLOB)");
    ParamSet p(reg);
    for (const auto& e : sec.entries) {
      try {
        p.set(e.code, e.value);
      } catch (const ConfigError& err) {
        throw ConfigError(origin + ":" + std::to_string(e.line) + ": " + err.what());
      }
    }
    if (reg == &kSceneSpec) {
      if (have_scene) throw ConfigError(origin + ":" + std::to_string(sec.line) + ": duplicate SCENE section");
      have_scene = true;
      s.width = p.integer("scn.wdth");
      s.height = p.integer("scn.hght");
      s.frames = static_cast<std::int64_t>(p.real("scn.nfrm"));
      s.fps = p.real("scn.frat");
      s.seed = static_cast<std::uint64_t>(p.real("scn.seed"));
      s.noise = p.real("scn.nois");
      s.background = p.integer("scn.bgnd");
      s.outside = p.integer("scn.outs");
      s.camera = CameraModel::manual(p.real("scn.fx"), p.real("scn.fy"), p.real("scn.cx"), p.real("scn.cy"));
      s.camera.distortion.k1 = p.real("scn.k1");
      s.camera.distortion.k2 = p.real("scn.k2");
      s.camera.distortion.k3 = p.real("scn.k3");
      s.camera.distortion.p1 = p.real("scn.p1");
      s.camera.distortion.p2 = p.real("scn.p2");
    } else if (reg == &kArenaSpec) {
      SceneArena a;
      a.rect = {p.integer("are.x0"), p.integer("are.y0"), p.integer("are.x1"), p.integer("are.y1")};
      a.circular = p.integer("are.circ") != 0;
      s.arenas.push_back(a);
    } else {
      SceneBlob b;
      b.arena = p.integer("blb.aren");
      b.path = static_cast<PathKind>(p.integer("blb.path"));
      b.start = {p.real("blb.x0"), p.real("blb.y0")};
      b.velocity = {p.real("blb.vx"), p.real("blb.vy")};
      b.center = {p.real("blb.cx"), p.real("blb.cy")};
      b.radius = p.real("blb.radi");
      b.omega = p.real("blb.omeg");
      b.phase = p.real("blb.phas");
      b.major = p.real("blb.majr");
      b.minor = p.real("blb.minr");
      b.intensity = p.integer("blb.inte");
      b.texture = static_cast<Texture>(p.integer("blb.text"));
      b.amplitude = p.integer("blb.tamp");
      b.period = p.real("blb.tper");
      b.first = static_cast<std::int64_t>(p.real("blb.frst"));
      b.last = static_cast<std::int64_t>(p.real("blb.last"));
      s.blobs.push_back(b);
    }
  }
  if (!have_scene) throw ConfigError(origin + ": missing SCENE section");
  s.validate();
  return s;
}

}  // namespace

// Cached per-scene rendering state.
struct SceneRenderer {
  explicit SceneRenderer(const Scene& s) {
    background = Frame(s.width, s.height, static_cast<std::uint8_t>(s.outside));
    for (int y = 0; y < s.height; ++y)
      for (int x = 0; x < s.width; ++x)
        for (const auto& a : s.arenas)
          if (inside_arena(a, x + 0.5, y + 0.5)) background.at(x, y) = static_cast<std::uint8_t>(s.background);
    if (s.noise > 0) noise = noise_table(s.seed);
    distorted = !s.camera.distortion.is_zero();
    if (distorted) {
      table.width = s.width;
      table.height = s.height;
      table.src_x.resize(static_cast<std::size_t>(s.width) * s.height);
      table.src_y.resize(table.src_x.size());
      for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x) {
          const Point2d n = pixel_to_normalized({static_cast<double>(x), static_cast<double>(y)}, s.camera);
          const Point2d src = normalized_to_pixel(undistort_point(n, s.camera.distortion), s.camera);
          const std::size_t i = static_cast<std::size_t>(y) * s.width + x;
          const bool ok = src.x >= 0 && src.y >= 0 && src.x <= s.width - 1 && src.y <= s.height - 1;
          table.src_x[i] = ok ? static_cast<float>(src.x) : -1.0f;
          table.src_y[i] = ok ? static_cast<float>(src.y) : -1.0f;
        }
    }
  }

  Frame ideal(const Scene& s, std::int64_t frame) const {
    Frame f = background;
    for (const auto& b : s.blobs) {
      const BlobState st = blob_state(b, s, frame);
      if (!st.visible) continue;
      const double ext = b.major + 2;
      const int x0 = std::max(0, static_cast<int>(std::floor(st.pos.x - ext)));
      const int x1 = std::min(s.width - 1, static_cast<int>(std::ceil(st.pos.x + ext)));
      const int y0 = std::max(0, static_cast<int>(std::floor(st.pos.y - ext)));
      const int y1 = std::min(s.height - 1, static_cast<int>(std::ceil(st.pos.y + ext)));
      const double c = std::cos(st.angle), sn = std::sin(st.angle);
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
          const Point2d q{static_cast<double>(x), static_cast<double>(y)};
          const double a = blob_coverage(b, st, q);
          if (a <= 0) continue;
          const double dx = q.x - st.pos.x, dy = q.y - st.pos.y;
          const double u = dx * c + dy * sn, v = -dx * sn + dy * c;
          const double val = f.at(x, y) * (1 - a) + texture_value(b, u, v) * a;
          f.at(x, y) = static_cast<std::uint8_t>(std::lround(std::clamp(val, 0.0, 255.0)));
        }
    }
    return f;
  }

  Frame render(const Scene& s, std::int64_t frame) const {
    Frame f = ideal(s, frame);
    if (distorted) {
      Frame raw(s.width, s.height);
      kernels::remap_bilinear(f, table, raw, static_cast<std::uint8_t>(s.outside));
      f = std::move(raw);
    }
    if (!noise.empty()) {
      std::uint64_t st = s.seed ^ (static_cast<std::uint64_t>(frame) * 0xD1B54A32D192ED03ull);
      const std::size_t off = static_cast<std::size_t>(splitmix(st)) & kNoiseMask;
      const float sigma = static_cast<float>(s.noise);
      for (std::size_t i = 0; i < f.pixels.size(); ++i) {
        const float v = f.pixels[i] + sigma * noise[(off + i) & kNoiseMask];
        f.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
    f.index = frame;
    f.time_s = static_cast<double>(frame) / s.fps;
    return f;
  }

  Frame background;
  std::vector<float> noise;
  bool distorted = false;
  kernels::RemapTable table;
};

void Scene::validate() const {
  if (arenas.empty()) throw ConfigError("scene: at least one ARENA is required");
  for (std::size_t i = 0; i < arenas.size(); ++i) {
    const Rect& r = arenas[i].rect;
    if (r.x0 < 0 || r.y0 < 0 || r.x1 > width || r.y1 > height || r.x1 <= r.x0 || r.y1 <= r.y0)
      throw ConfigError("scene: arena " + std::to_string(i + 1) + " rectangle outside the frame");
  }
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    const SceneBlob& b = blobs[i];
    if (b.arena < 0 || b.arena >= static_cast<int>(arenas.size()))
      throw ConfigError("scene: blob " + std::to_string(i + 1) + " references a missing arena");
    if (b.minor > b.major) throw ConfigError("scene: blob " + std::to_string(i + 1) + " minor axis exceeds major");
    for (std::int64_t f = 0; f < frames; ++f) {
      const BlobState st = blob_state(b, *this, f);
      if (!st.visible) continue;
      if (st.pos.x - b.major < 0 || st.pos.y - b.major < 0 || st.pos.x + b.major > width ||
          st.pos.y + b.major > height)
        throw ConfigError("scene: blob " + std::to_string(i + 1) + " leaves the frame at frame " +
                          std::to_string(f));
    }
  }
}

Scene parse_scene(const std::string& text, const std::string& origin) {
  return scene_from_sections(parse_sections(text, origin), origin);
}

Scene load_scene(const std::string& path) { return parse_scene(read_file(path), path); }

std::string format_scene(const Scene& s) {
  std::ostringstream os;
  auto kv = [&](const char* code, double v) { os << code << "\t" << format_number(v) << "\n"; };
  os << "SCENE\n";
  kv("scn.wdth", s.width);
  kv("scn.hght", s.height);
  os << "scn.nfrm\t" << s.frames << "\n";
  kv("scn.frat", s.fps);
  os << "scn.seed\t" << s.seed << "\n";
  kv("scn.nois", s.noise);
  kv("scn.bgnd", s.background);
  kv("scn.outs", s.outside);
  kv("scn.fx", s.camera.fx());
  kv("scn.fy", s.camera.fy());
  kv("scn.cx", s.camera.cx());
  kv("scn.cy", s.camera.cy());
  kv("scn.k1", s.camera.distortion.k1);
  kv("scn.k2", s.camera.distortion.k2);
  kv("scn.k3", s.camera.distortion.k3);
  kv("scn.p1", s.camera.distortion.p1);
  kv("scn.p2", s.camera.distortion.p2);
  for (const auto& a : s.arenas) {
    os << "\nARENA\n";
    kv("are.x0", a.rect.x0);
    kv("are.y0", a.rect.y0);
    kv("are.x1", a.rect.x1);
    kv("are.y1", a.rect.y1);
    kv("are.circ", a.circular ? 1 : 0);
  }
  for (const auto& b : s.blobs) {
    os << "\nBLOB\n";
    kv("blb.aren", b.arena);
    kv("blb.path", static_cast<int>(b.path));
    kv("blb.x0", b.start.x);
    kv("blb.y0", b.start.y);
    kv("blb.vx", b.velocity.x);
    kv("blb.vy", b.velocity.y);
    kv("blb.cx", b.center.x);
    kv("blb.cy", b.center.y);
    kv("blb.radi", b.radius);
    kv("blb.omeg", b.omega);
    kv("blb.phas", b.phase);
    kv("blb.majr", b.major);
    kv("blb.minr", b.minor);
    kv("blb.inte", b.intensity);
    kv("blb.text", static_cast<int>(b.texture));
    kv("blb.tamp", b.amplitude);
    kv("blb.tper", b.period);
    os << "blb.frst\t" << b.first << "\n";
    os << "blb.last\t" << b.last << "\n";
  }
  return os.str();
}

BlobState blob_state(const SceneBlob& b, const Scene& s, std::int64_t frame) {
  BlobState st;
  st.visible = frame >= b.first && (b.last < 0 || frame <= b.last);
  const double t = static_cast<double>(frame);
  Point2d vel = b.velocity;
  switch (b.path) {
    case PathKind::Linear:
      st.pos = {b.start.x + b.velocity.x * t, b.start.y + b.velocity.y * t};
      break;
    case PathKind::Circular: {
      const double a = b.phase + b.omega * t;
      st.pos = {b.center.x + b.radius * std::cos(a), b.center.y + b.radius * std::sin(a)};
      vel = {-b.omega * std::sin(a), b.omega * std::cos(a)};
      break;
    }
    case PathKind::Bounce: {
      const SceneArena& ar = s.arenas.at(static_cast<std::size_t>(b.arena));
      double x0 = ar.rect.x0, x1 = ar.rect.x1, y0 = ar.rect.y0, y1 = ar.rect.y1;
      if (ar.circular) {
        const double cx = (x0 + x1) / 2, cy = (y0 + y1) / 2;
        const double hx = (x1 - x0) / 2 / std::numbers::sqrt2, hy = (y1 - y0) / 2 / std::numbers::sqrt2;
        x0 = cx - hx;
        x1 = cx + hx;
        y0 = cy - hy;
        y1 = cy + hy;
      }
      const double m = b.major + 14;  // clear of the eroded tracking-area border
      double dx = 1, dy = 1;
      st.pos = {reflect(b.start.x + b.velocity.x * t, x0 + m, x1 - m, &dx),
                reflect(b.start.y + b.velocity.y * t, y0 + m, y1 - m, &dy)};
      vel = {b.velocity.x * dx, b.velocity.y * dy};
      break;
    }
  }
  st.angle = (vel.x == 0 && vel.y == 0) ? 0.0 : std::atan2(vel.y, vel.x);
  return st;
}

double blob_coverage(const SceneBlob& b, const BlobState& st, Point2d q) {
  const double dx = q.x - st.pos.x, dy = q.y - st.pos.y;
  const double c = std::cos(st.angle), s = std::sin(st.angle);
  const double u = dx * c + dy * s, v = -dx * s + dy * c;
  const double d = std::hypot(u, v);
  if (d == 0) return 1.0;
  const double rn = std::sqrt((u / b.major) * (u / b.major) + (v / b.minor) * (v / b.minor));
  const double edge = d / rn - d;  // distance to the boundary along the ray
  return std::clamp(edge / 2.0 + 0.5, 0.0, 1.0);
}

Frame render_ideal(const Scene& s, std::int64_t frame) {
  Scene plain = s;
  plain.noise = 0;
  plain.camera.distortion = {};
  return SceneRenderer(plain).ideal(plain, frame);
}

Frame render_frame(const Scene& s, std::int64_t frame) { return SceneRenderer(s).render(s, frame); }

Frame SyntheticSource::frame(std::int64_t index) {
  if (index < 0 || index >= scene_.frames) throw IoError("synthetic frame " + std::to_string(index) + " out of range");
  if (!renderer_) renderer_ = std::make_shared<const SceneRenderer>(scene_);
  return renderer_->render(scene_, index);
}

std::vector<TruthPoint> scene_truth(const Scene& s) {
  std::vector<TruthPoint> out;
  std::vector<int> in_arena(s.blobs.size());
  std::vector<int> per_arena(s.arenas.size(), 0);
  for (std::size_t i = 0; i < s.blobs.size(); ++i) in_arena[i] = per_arena[s.blobs[i].arena]++;
  std::vector<BlobState> st(s.blobs.size());
  for (std::int64_t f = 0; f < s.frames; ++f) {
    for (std::size_t i = 0; i < s.blobs.size(); ++i) st[i] = blob_state(s.blobs[i], s, f);
    for (std::size_t i = 0; i < s.blobs.size(); ++i) {
      if (!st[i].visible) continue;
      TruthPoint tp;
      tp.frame = f;
      tp.arena = s.blobs[i].arena;
      tp.blob = static_cast<int>(i);
      tp.blob_in_arena = in_arena[i];
      tp.pixel = st[i].pos;
      tp.world = pixel_to_world(st[i].pos, s.camera);
      for (std::size_t j = 0; j < s.blobs.size() && !tp.occluded; ++j) {
        if (j == i || !st[j].visible || s.blobs[j].arena != s.blobs[i].arena) continue;
        const double reach = s.blobs[i].major + s.blobs[j].major + 2;
        if (std::hypot(st[i].pos.x - st[j].pos.x, st[i].pos.y - st[j].pos.y) > reach) continue;
        const int ext = static_cast<int>(std::ceil(s.blobs[i].major + 1));
        const int cx = static_cast<int>(std::floor(st[i].pos.x)), cy = static_cast<int>(std::floor(st[i].pos.y));
        for (int y = cy - ext; y <= cy + ext && !tp.occluded; ++y)
          for (int x = cx - ext; x <= cx + ext; ++x) {
            const Point2d q{static_cast<double>(x), static_cast<double>(y)};
            if (blob_coverage(s.blobs[i], st[i], q) > 0.5 && blob_coverage(s.blobs[j], st[j], q) > 0.5) {
              tp.occluded = true;
              break;
            }
          }
      }
      out.push_back(tp);
    }
  }
  return out;
}

std::string format_truth(const Scene& s, const std::vector<TruthPoint>& truth) {
  std::ostringstream os;
  const std::string& u = s.camera.unit_name;
  os << "Time (sec)\tArena\tTrack\tPos. X (" << u << ")\tPos. Y (" << u << ")\tLabel\n";
  for (const auto& t : truth)
    os << format_number(static_cast<double>(t.frame) / s.fps) << "\t" << t.arena + 1 << "\t" << t.blob_in_arena + 1
       << "\t" << format_number(t.world.x) << "\t" << format_number(t.world.y) << "\t" << (t.occluded ? 2 : 1)
       << "\n";
  return os.str();
}

std::vector<std::string> preset_names() { return {"single", "four-arena", "crossing", "hd"}; }

Scene preset_scene(const std::string& name, std::uint64_t seed) {
  Scene s;
  s.seed = seed;
  auto blob = [](int arena, Point2d start, Point2d vel, Texture tex, int intensity) {
    SceneBlob b;
    b.arena = arena;
    b.path = PathKind::Bounce;
    b.start = start;
    b.velocity = vel;
    b.texture = tex;
    b.intensity = intensity;
    b.amplitude = tex == Texture::Uniform ? 0 : 30;
    return b;
  };
  if (name == "single") {
    s.frames = 250;
    s.arenas.push_back({{40, 40, 600, 440}, false});
    s.blobs.push_back(blob(0, {200, 150}, {2.3, 1.7}, Texture::Stripes, 40));
  } else if (name == "four-arena") {
    s.width = 960;
    s.height = 540;
    s.frames = 1500;
    s.noise = 2;
    s.arenas = {{{15, 15, 475, 265}, false},
                {{485, 15, 945, 265}, false},
                {{15, 275, 475, 525}, false},
                {{485, 275, 945, 525}, false}};
    const Texture tex[4] = {Texture::Stripes, Texture::Checker, Texture::Rings, Texture::Spots};
    for (int a = 0; a < 4; ++a) {
      const Rect& r = s.arenas[a].rect;
      s.blobs.push_back(blob(a, {r.x0 + 60.0 + 10 * a, r.y0 + 50.0 + 7 * a}, {1.9 + 0.3 * a, 1.3 - 0.2 * a},
                             tex[a], 40));
    }
  } else if (name == "crossing") {
    s.frames = 3600;
    s.noise = 1;
    s.arenas.push_back({{20, 20, 620, 460}, false});
    const Texture tex[5] = {Texture::Uniform, Texture::Stripes, Texture::Checker, Texture::Rings, Texture::Spots};
    const int inten[5] = {20, 35, 45, 30, 40};
    const Point2d starts[5] = {{100, 100}, {500, 120}, {320, 380}, {150, 350}, {450, 300}};
    const Point2d vels[5] = {{2.9, 2.0}, {-2.4, 3.1}, {1.8, -3.4}, {3.5, -1.3}, {-3.1, -2.2}};
    for (int i = 0; i < 5; ++i) {
      SceneBlob b = blob(0, starts[i], vels[i], tex[i], inten[i]);
      b.amplitude = tex[i] == Texture::Uniform ? 0 : 25;
      s.blobs.push_back(b);
    }
  } else if (name == "hd") {
    s.width = 1280;
    s.height = 720;
    s.frames = 300;
    s.noise = 2;
    s.arenas.push_back({{40, 40, 1240, 680}, false});
    s.blobs.push_back(blob(0, {300, 200}, {3.1, 2.2}, Texture::Stripes, 40));
    s.blobs.push_back(blob(0, {900, 500}, {-2.4, 1.8}, Texture::Checker, 40));
  } else {
    throw ConfigError("unknown scene preset '" + name + "'");
  }
  s.validate();
  return s;
}

}  // namespace arenatrack

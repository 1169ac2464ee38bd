#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "arenatrack/calibration.hpp"
#include "arenatrack/frame.hpp"
#include "arenatrack/frame_source.hpp"

namespace arenatrack {

enum class PathKind { Linear = 0, Circular = 1, Bounce = 2 };
enum class Texture { Uniform = 0, Stripes = 1, Checker = 2, Gradient = 3, Rings = 4, Spots = 5 };

struct SceneArena {
  Rect rect;
  bool circular = false;
};

struct SceneBlob {
  int arena = 0;
  PathKind path = PathKind::Linear;
  Point2d start;         // linear/bounce start, pixels
  Point2d velocity;      // pixels per frame
  Point2d center;        // circular path center
  double radius = 0;     // circular path radius
  double omega = 0;      // radians per frame
  double phase = 0;      // radians
  double major = 12, minor = 6;  // semi-axes, pixels
  int intensity = 40;
  Texture texture = Texture::Uniform;
  int amplitude = 0;
  double period = 6;
  std::int64_t first = 0, last = -1;  // visible frames, last < 0 = to the end
};

struct Scene {
  int width = 640, height = 480;
  std::int64_t frames = 250;
  double fps = 25;
  std::uint64_t seed = 0;
  double noise = 0;
  int background = 230;
  int outside = 40;
  CameraModel camera;  // pixel <-> world; distortion applied to raw frames
  std::vector<SceneArena> arenas;
  std::vector<SceneBlob> blobs;

  void validate() const;
};

// Built-in scenes: single, four-arena, crossing, hd.
Scene preset_scene(const std::string& name, std::uint64_t seed = 0);
std::vector<std::string> preset_names();

Scene parse_scene(const std::string& text, const std::string& origin = "scene");
Scene load_scene(const std::string& path);
std::string format_scene(const Scene& s);

struct BlobState {
  Point2d pos;        // undistorted pixels
  double angle = 0;   // major axis orientation, radians
  bool visible = false;
};
BlobState blob_state(const SceneBlob& b, const Scene& s, std::int64_t frame);

// Rendering without distortion or noise.
Frame render_ideal(const Scene& s, std::int64_t frame);
Frame render_frame(const Scene& s, std::int64_t frame);

// Coverage of the anti-aliased blob at pixel center q (0..1).
double blob_coverage(const SceneBlob& b, const BlobState& st, Point2d q);

struct TruthPoint {
  std::int64_t frame = 0;
  int arena = 0;  // 0-based
  int blob = 0;   // 0-based, scene order
  int blob_in_arena = 0;
  Point2d pixel;  // undistorted
  Point2d world;
  bool occluded = false;
};
std::vector<TruthPoint> scene_truth(const Scene& s);
// Tracking_RealSpace layout, arena and track 1-based, label 2 while occluded.
std::string format_truth(const Scene& s, const std::vector<TruthPoint>& truth);

struct SceneRenderer;

class SyntheticSource : public FrameSource {
 public:
  explicit SyntheticSource(Scene s) : scene_(std::move(s)) {}
  int width() const override { return scene_.width; }
  int height() const override { return scene_.height; }
  double fps() const override { return scene_.fps; }
  std::int64_t count() const override { return scene_.frames; }
  Frame frame(std::int64_t index) override;
  std::string name() const override { return "synthetic"; }
  const Scene& scene() const { return scene_; }

 private:
  Scene scene_;
  std::shared_ptr<const SceneRenderer> renderer_;
};

}  // namespace arenatrack

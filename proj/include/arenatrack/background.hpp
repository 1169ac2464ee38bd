#pragma once

#include <cstdint>
#include <vector>

#include "arenatrack/frame.hpp"

namespace arenatrack {

struct GmmParams {
  bool enabled = false;
  int history = 500;          // T
  double mahal_thresh = 25.0;
  int num_gaussians = 5;      // M
  double background_ratio = 0.99;
  double learning_rate = 1e-6;  // <0 means 1/T

  double alpha() const;
  void validate() const;
};

struct GmmComponent {
  float weight = 0.0f;
  float mean = 0.0f;
  float var = 0.0f;
};

inline constexpr float kInitialVariance = 15.0f * 15.0f;
inline constexpr float kMinVariance = 4.0f;

// One pixel's update. comps holds `n` components sorted by descending weight
// and room for M. Returns true when x is foreground.
bool gmm_update_pixel(GmmComponent* comps, int& n, float x, double alpha, const GmmParams& p);

class BackgroundModel {
 public:
  BackgroundModel(int width, int height, const GmmParams& p);

  // Foreground mask. Disabled models return an all-true mask.
  BinaryMask apply(const Frame& f);
  BinaryMask apply_serial(const Frame& f);

  int width() const { return width_; }
  int height() const { return height_; }
  std::int64_t frames_seen() const { return frames_; }
  int count(int x, int y) const { return counts_[idx(x, y)]; }
  const GmmComponent* components(int x, int y) const { return comps_.data() + idx(x, y) * M_; }
  void set_pixel(int x, int y, const std::vector<GmmComponent>& c);

 private:
  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }
  int width_, height_, M_;
  GmmParams params_;
  std::int64_t frames_ = 0;
  std::vector<GmmComponent> comps_;
  std::vector<std::uint8_t> counts_;
};

}  // namespace arenatrack

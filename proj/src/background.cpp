#include "arenatrack/background.hpp"

#include <omp.h>

#include <algorithm>

#include "arenatrack/errors.hpp"
#include "arenatrack/kernels.hpp"

namespace arenatrack {

double GmmParams::alpha() const {
  if (learning_rate < 0) return 1.0 / history;
  return std::min(learning_rate, 1.0);
}

void GmmParams::validate() const {
  if (!(background_ratio > 0 && background_ratio <= 1)) throw ConfigError("bgs.ratb must be in (0, 1]");
  if (num_gaussians < 1 || num_gaussians > 255) throw ConfigError("bgs.numg must be in [1, 255]");
  if (history < 1) throw ConfigError("bgs.num must be at least 1");
  if (mahal_thresh <= 0) throw ConfigError("bgs.thre must be positive");
  if (learning_rate > 1) throw ConfigError("bgs.lstp must not exceed 1");
}

bool gmm_update_pixel(GmmComponent* c, int& n, float x, double alpha, const GmmParams& p) {
  if (n == 0) {
    c[0] = {1.0f, x, kInitialVariance};
    n = 1;
    return true;
  }
  int match = -1;
  for (int m = 0; m < n; ++m) {
    const float d = x - c[m].mean;
    if (d * d < p.mahal_thresh * c[m].var) {
      match = m;
      break;
    }
  }
  int B = n;
  double cum = 0.0;
  for (int b = 0; b < n; ++b) {
    cum += c[b].weight;
    if (cum > p.background_ratio) {
      B = b + 1;
      break;
    }
  }
  const bool foreground = !(match >= 0 && match < B);
  if (alpha <= 0.0) return foreground;

  const float a = static_cast<float>(alpha);
  if (match >= 0) {
    for (int m = 0; m < n; ++m) c[m].weight = (1.0f - a) * c[m].weight + (m == match ? a : 0.0f);
    GmmComponent& k = c[match];
    const float rho = a / k.weight;
    const float d = x - k.mean;
    k.mean += rho * d;
    k.var = std::max(kMinVariance, (1.0f - rho) * k.var + rho * d * d);
  } else {
    float before = 0.0f;
    for (int m = 0; m < n; ++m) before += c[m].weight;
    for (int m = 0; m < n; ++m) c[m].weight *= (1.0f - a);
    const int slot = n < p.num_gaussians ? n++ : n - 1;
    c[slot] = {a, x, kInitialVariance};
    float after = 0.0f;
    for (int m = 0; m < n; ++m) after += c[m].weight;
    if (after > 0.0f) {
      const float s = before / after;
      for (int m = 0; m < n; ++m) c[m].weight *= s;
    }
  }
  for (int i = 1; i < n; ++i) {
    const GmmComponent v = c[i];
    int j = i - 1;
    while (j >= 0 && c[j].weight < v.weight) {
      c[j + 1] = c[j];
      --j;
    }
    c[j + 1] = v;
  }
  while (n > 1 && c[n - 1].weight <= 0.0f) --n;
  return foreground;
}

BackgroundModel::BackgroundModel(int width, int height, const GmmParams& p)
    : width_(width), height_(height), M_(p.num_gaussians), params_(p) {
  p.validate();
  if (p.enabled) {
    comps_.resize(static_cast<std::size_t>(width) * height * M_);
    counts_.assign(static_cast<std::size_t>(width) * height, 0);
  }
}

void BackgroundModel::set_pixel(int x, int y, const std::vector<GmmComponent>& c) {
  if (static_cast<int>(c.size()) > M_) throw ConfigError("more components than bgs.numg");
  std::copy(c.begin(), c.end(), comps_.begin() + static_cast<std::ptrdiff_t>(idx(x, y) * M_));
  counts_[idx(x, y)] = static_cast<std::uint8_t>(c.size());
}

BinaryMask BackgroundModel::apply(const Frame& f) {
  BinaryMask fg(width_, height_, true);
  if (!params_.enabled) return fg;
  const double alpha = params_.alpha();
  const std::int64_t n = static_cast<std::int64_t>(width_) * height_;
  const int nt = kernels::threads();
#pragma omp parallel for num_threads(nt) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    int cnt = counts_[i];
    fg.bits[i] = gmm_update_pixel(comps_.data() + i * M_, cnt, f.pixels[i], alpha, params_) ? 1 : 0;
    counts_[i] = static_cast<std::uint8_t>(cnt);
  }
  ++frames_;
  return fg;
}

BinaryMask BackgroundModel::apply_serial(const Frame& f) {
  BinaryMask fg(width_, height_, true);
  if (!params_.enabled) return fg;
  const double alpha = params_.alpha();
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) {
      const std::size_t i = idx(x, y);
      int cnt = counts_[i];
      fg.at(x, y) = gmm_update_pixel(comps_.data() + i * M_, cnt, f.at(x, y), alpha, params_) ? 1 : 0;
      counts_[i] = static_cast<std::uint8_t>(cnt);
    }
  ++frames_;
  return fg;
}

}  // namespace arenatrack

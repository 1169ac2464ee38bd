#include "arenatrack/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "arenatrack/errors.hpp"
#include "arenatrack/imaging.hpp"

namespace arenatrack::kernels {

namespace {

int g_threads = 0;

int num_threads() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

void check_blur_size(int size) {
  if (size < 0 || (size > 1 && size % 2 == 0))
    throw ConfigError("gaussian kernel size must be odd, got " + std::to_string(size));
}

std::vector<double> gaussian_weights(int size) {
  const int r = size / 2;
  const double sigma = gaussian_sigma(size);
  std::vector<double> g(size);
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - r;
    g[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Integer weights summing to 256, symmetric.
std::vector<std::uint32_t> fixed_weights(int size) {
  const auto g = gaussian_weights(size);
  std::vector<std::uint32_t> w(size);
  int sum = 0;
  for (int i = 0; i < size; ++i) {
    w[i] = static_cast<std::uint32_t>(std::lround(g[i] * 256.0));
    sum += static_cast<int>(w[i]);
  }
  w[size / 2] = static_cast<std::uint32_t>(static_cast<int>(w[size / 2]) + 256 - sum);
  return w;
}

void minmax(const Frame& in, int& lo, int& hi) {
  lo = 255;
  hi = 0;
  for (std::uint8_t v : in.pixels) {
    lo = std::min<int>(lo, v);
    hi = std::max<int>(hi, v);
  }
}

void build_lut(int lo, int hi, std::uint8_t* lut) {
  for (int v = 0; v < 256; ++v) {
    if (hi <= lo) {
      lut[v] = 0;
    } else {
      const int c = std::clamp(v, lo, hi);
      lut[v] = static_cast<std::uint8_t>((255 * (c - lo) + (hi - lo) / 2) / (hi - lo));
    }
  }
}

// Horizontal window OR (dilate) / AND (erode) over [x-w, x+w]. Outside the
// row counts as 0 for OR and 1 for AND.
void hwindow(const std::uint8_t* in, std::uint8_t* out, int width, int w, bool is_and) {
  if (w == 0) {
    std::copy(in, in + width, out);
    return;
  }
  std::copy(in, in + width, out);
  for (int k = 1; k <= w; ++k) {
    if (is_and) {
      for (int x = 0; x + k < width; ++x) out[x] &= in[x + k];
      for (int x = k; x < width; ++x) out[x] &= in[x - k];
    } else {
      for (int x = 0; x + k < width; ++x) out[x] |= in[x + k];
      for (int x = k; x < width; ++x) out[x] |= in[x - k];
    }
  }
}

void morph(const BinaryMask& in, BinaryMask& out, int element_size, bool is_and) {
  const int W = in.width, H = in.height;
  out = BinaryMask(W, H);
  if (element_size <= 1) {
    out.bits = in.bits;
    return;
  }
  const auto hw = disc_half_widths(element_size);
  const int r = static_cast<int>(hw.size()) / 2;
  std::vector<int> distinct(hw.begin(), hw.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::vector<std::uint8_t>> hbuf(distinct.size());
  for (auto& b : hbuf) b.resize(static_cast<std::size_t>(W) * H);
  const int nt = num_threads();
#pragma omp parallel for num_threads(nt) schedule(static)
  for (int y = 0; y < H; ++y)
    for (std::size_t d = 0; d < distinct.size(); ++d)
      hwindow(in.row(y), hbuf[d].data() + static_cast<std::size_t>(y) * W, W, distinct[d], is_and);
  std::vector<int> which(hw.size());
  for (std::size_t i = 0; i < hw.size(); ++i)
    which[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), hw[i]) - distinct.begin());
#pragma omp parallel for num_threads(nt) schedule(static)
  for (int y = 0; y < H; ++y) {
    std::uint8_t* o = out.row(y);
    std::fill(o, o + W, static_cast<std::uint8_t>(is_and ? 1 : 0));
    for (int dy = -r; dy <= r; ++dy) {
      const int yy = y + dy;
      if (yy < 0 || yy >= H) continue;
      const std::uint8_t* s = hbuf[which[dy + r]].data() + static_cast<std::size_t>(yy) * W;
      if (is_and)
        for (int x = 0; x < W; ++x) o[x] &= s[x];
      else
        for (int x = 0; x < W; ++x) o[x] |= s[x];
    }
  }
}

inline std::uint8_t sample_bilinear(const Frame& in, float sx, float sy, std::uint8_t fill) {
  if (!(sx >= 0.0f) || !(sy >= 0.0f) || sx > static_cast<float>(in.width - 1) ||
      sy > static_cast<float>(in.height - 1))
    return fill;
  const int x0 = static_cast<int>(sx);
  const int y0 = static_cast<int>(sy);
  const int x1 = std::min(x0 + 1, in.width - 1);
  const int y1 = std::min(y0 + 1, in.height - 1);
  const float fx = sx - static_cast<float>(x0);
  const float fy = sy - static_cast<float>(y0);
  const float top = in.at(x0, y0) * (1.0f - fx) + in.at(x1, y0) * fx;
  const float bot = in.at(x0, y1) * (1.0f - fx) + in.at(x1, y1) * fx;
  const float v = top * (1.0f - fy) + bot * fy;
  return static_cast<std::uint8_t>(std::clamp(static_cast<int>(v + 0.5f), 0, 255));
}

}  // namespace

void set_threads(int n) { g_threads = n; }
int threads() { return num_threads(); }

std::vector<int> disc_half_widths(int element_size) {
  if (element_size <= 1) return {0};
  const double R = element_size / 2.0;
  const int r = static_cast<int>(std::floor(R));
  std::vector<int> hw(2 * r + 1);
  for (int dy = -r; dy <= r; ++dy) {
    int w = 0;
    while ((w + 1) * (w + 1) + dy * dy <= R * R) ++w;
    hw[dy + r] = w;
  }
  return hw;
}

void normalize(const Frame& in, Frame& out) {
  int lo, hi;
  minmax(in, lo, hi);
  std::uint8_t lut[256];
  build_lut(lo, hi, lut);
  out = Frame(in.width, in.height);
  out.index = in.index;
  out.time_s = in.time_s;
  const std::int64_t n = static_cast<std::int64_t>(in.pixels.size());
  const int nt = num_threads();
#pragma omp parallel for num_threads(nt) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out.pixels[i] = lut[in.pixels[i]];
}

void gaussian_blur(const Frame& in, Frame& out, int size) {
  check_blur_size(size);
  out = Frame(in.width, in.height);
  out.index = in.index;
  out.time_s = in.time_s;
  if (size <= 1) {
    out.pixels = in.pixels;
    return;
  }
  const int W = in.width, H = in.height, r = size / 2;
  const auto w = fixed_weights(size);
  std::vector<std::uint16_t> h(static_cast<std::size_t>(W) * H);
  const int nt = num_threads();
#pragma omp parallel num_threads(nt)
  {
    std::vector<std::uint16_t> pad(W + 2 * r);
#pragma omp for schedule(static)
    for (int y = 0; y < H; ++y) {
      const std::uint8_t* s = in.row(y);
      for (int x = 0; x < W + 2 * r; ++x) pad[x] = s[std::clamp(x - r, 0, W - 1)];
      std::uint16_t* o = h.data() + static_cast<std::size_t>(y) * W;
      for (int x = 0; x < W; ++x) {
        std::uint32_t acc = 0;
        for (int k = 0; k < size; ++k) acc += w[k] * pad[x + k];
        o[x] = static_cast<std::uint16_t>(acc);
      }
    }
#pragma omp barrier
    std::vector<std::uint32_t> acc(W);
#pragma omp for schedule(static)
    for (int y = 0; y < H; ++y) {
      std::fill(acc.begin(), acc.end(), 32768u);
      for (int k = 0; k < size; ++k) {
        const int yy = std::clamp(y + k - r, 0, H - 1);
        const std::uint16_t* s = h.data() + static_cast<std::size_t>(yy) * W;
        const std::uint32_t wk = w[k];
        for (int x = 0; x < W; ++x) acc[x] += wk * s[x];
      }
      std::uint8_t* o = out.row(y);
      for (int x = 0; x < W; ++x) o[x] = static_cast<std::uint8_t>(acc[x] >> 16);
    }
  }
}

void threshold_below(const Frame& in, int thre, BinaryMask& out) {
  out = BinaryMask(in.width, in.height);
  const std::int64_t n = static_cast<std::int64_t>(in.pixels.size());
  const int nt = num_threads();
#pragma omp parallel for num_threads(nt) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out.bits[i] = in.pixels[i] < thre ? 1 : 0;
}

void dilate(const BinaryMask& in, BinaryMask& out, int element_size) { morph(in, out, element_size, false); }
void erode(const BinaryMask& in, BinaryMask& out, int element_size) { morph(in, out, element_size, true); }

void remap_bilinear(const Frame& in, const RemapTable& t, Frame& out, std::uint8_t fill) {
  out = Frame(t.width, t.height);
  out.index = in.index;
  out.time_s = in.time_s;
  const int nt = num_threads();
#pragma omp parallel for num_threads(nt) schedule(static)
  for (int y = 0; y < t.height; ++y) {
    const std::size_t base = static_cast<std::size_t>(y) * t.width;
    std::uint8_t* o = out.row(y);
    for (int x = 0; x < t.width; ++x) o[x] = sample_bilinear(in, t.src_x[base + x], t.src_y[base + x], fill);
  }
}

namespace reference {

void normalize(const Frame& in, Frame& out) {
  int lo = 255, hi = 0;
  for (std::uint8_t v : in.pixels) {
    lo = std::min<int>(lo, v);
    hi = std::max<int>(hi, v);
  }
  out = Frame(in.width, in.height);
  out.index = in.index;
  out.time_s = in.time_s;
  for (std::size_t i = 0; i < in.pixels.size(); ++i) {
    if (hi == lo) continue;
    const double v = 255.0 * (in.pixels[i] - lo) / static_cast<double>(hi - lo);
    out.pixels[i] = static_cast<std::uint8_t>(std::floor(v + 0.5));
  }
}

void gaussian_blur(const Frame& in, Frame& out, int size) {
  check_blur_size(size);
  out = Frame(in.width, in.height);
  out.index = in.index;
  out.time_s = in.time_s;
  if (size <= 1) {
    out.pixels = in.pixels;
    return;
  }
  // Direct 2-D sum with the same fixed-point weights, rounded once.
  const auto w = fixed_weights(size);
  const int r = size / 2;
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      std::uint64_t acc = 0;
      for (int j = -r; j <= r; ++j)
        for (int i = -r; i <= r; ++i) {
          const int xx = std::clamp(x + i, 0, in.width - 1);
          const int yy = std::clamp(y + j, 0, in.height - 1);
          acc += static_cast<std::uint64_t>(w[i + r]) * w[j + r] * in.at(xx, yy);
        }
      out.at(x, y) = static_cast<std::uint8_t>((acc + 32768u) >> 16);
    }
}

void threshold_below(const Frame& in, int thre, BinaryMask& out) {
  out = BinaryMask(in.width, in.height);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) out.at(x, y) = in.at(x, y) < thre ? 1 : 0;
}

namespace {
void brute_morph(const BinaryMask& in, BinaryMask& out, int element_size, bool is_and) {
  out = BinaryMask(in.width, in.height);
  const double R = element_size <= 1 ? 0.0 : element_size / 2.0;
  const int r = static_cast<int>(std::floor(R));
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      bool acc = is_and;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          if (dx * dx + dy * dy > R * R) continue;
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= in.width || yy >= in.height) continue;
          if (is_and)
            acc = acc && in.at(xx, yy);
          else
            acc = acc || in.at(xx, yy);
        }
      out.at(x, y) = acc ? 1 : 0;
    }
}
}  // namespace

void dilate(const BinaryMask& in, BinaryMask& out, int element_size) { brute_morph(in, out, element_size, false); }
void erode(const BinaryMask& in, BinaryMask& out, int element_size) { brute_morph(in, out, element_size, true); }

void remap_bilinear(const Frame& in, const RemapTable& t, Frame& out, std::uint8_t fill) {
  out = Frame(t.width, t.height);
  out.index = in.index;
  out.time_s = in.time_s;
  for (int y = 0; y < t.height; ++y)
    for (int x = 0; x < t.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * t.width + x;
      out.at(x, y) = sample_bilinear(in, t.src_x[i], t.src_y[i], fill);
    }
}

}  // namespace reference

}  // namespace arenatrack::kernels

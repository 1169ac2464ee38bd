#include "arenatrack/imaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "arenatrack/errors.hpp"
#include "arenatrack/kernels.hpp"

namespace arenatrack {

std::int64_t BinaryMask::count() const {
  std::int64_t n = 0;
  for (std::uint8_t b : bits) n += b;
  return n;
}

Frame crop(const Frame& f, const Rect& r) {
  Frame out(r.width(), r.height());
  out.index = f.index;
  out.time_s = f.time_s;
  for (int y = 0; y < r.height(); ++y) std::copy_n(f.row(r.y0 + y) + r.x0, r.width(), out.row(y));
  return out;
}

BinaryMask crop(const BinaryMask& m, const Rect& r) {
  BinaryMask out(r.width(), r.height());
  for (int y = 0; y < r.height(); ++y) std::copy_n(m.row(r.y0 + y) + r.x0, r.width(), out.row(y));
  return out;
}

Frame normalize(const Frame& in) {
  Frame out;
  kernels::normalize(in, out);
  return out;
}

double gaussian_sigma(int size) { return 0.3 * ((size - 1) * 0.5 - 1.0) + 0.8; }

Frame gaussian_blur(const Frame& in, int size) {
  Frame out;
  kernels::gaussian_blur(in, out, size);
  return out;
}

Frame normalize_and_blur(const Frame& in, int gaussian_size, bool normalize_first) {
  if (gaussian_size < 0 || (gaussian_size > 1 && gaussian_size % 2 == 0))
    throw ConfigError("gaussian kernel size must be odd, got " + std::to_string(gaussian_size));
  if (!normalize_first) return gaussian_blur(in, gaussian_size);
  return gaussian_blur(normalize(in), gaussian_size);
}

int otsu_threshold(const Frame& f, const BinaryMask* region) {
  std::array<std::int64_t, 256> hist{};
  for (std::size_t i = 0; i < f.pixels.size(); ++i)
    if (!region || region->bits[i]) ++hist[f.pixels[i]];
  const std::int64_t total = std::accumulate(hist.begin(), hist.end(), std::int64_t{0});
  if (total == 0) return 0;
  double sum_all = 0.0;
  for (int v = 0; v < 256; ++v) sum_all += static_cast<double>(v) * hist[v];
  double best = -1.0;
  int best_k = 0;
  std::int64_t w0 = 0;
  double sum0 = 0.0;
  for (int k = 0; k < 256; ++k) {
    w0 += hist[k];
    sum0 += static_cast<double>(k) * hist[k];
    const std::int64_t w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    const double between = static_cast<double>(w0) * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_k = k;
    }
  }
  return best_k + 1;
}

BinaryMask threshold_below(const Frame& f, int thre) {
  if (thre == 0) thre = otsu_threshold(f);
  BinaryMask m;
  kernels::threshold_below(f, thre, m);
  return m;
}

BinaryMask threshold_at_least(const Frame& f, int thre) {
  BinaryMask m(f.width, f.height);
  for (std::size_t i = 0; i < f.pixels.size(); ++i) m.bits[i] = f.pixels[i] >= thre ? 1 : 0;
  return m;
}

BinaryMask dilate(const BinaryMask& m, int element_size, int iterations) {
  BinaryMask cur = m, next;
  for (int i = 0; i < iterations && element_size > 1; ++i) {
    kernels::dilate(cur, next, element_size);
    std::swap(cur, next);
  }
  return cur;
}

BinaryMask erode(const BinaryMask& m, int element_size, int iterations) {
  BinaryMask cur = m, next;
  for (int i = 0; i < iterations && element_size > 1; ++i) {
    kernels::erode(cur, next, element_size);
    std::swap(cur, next);
  }
  return cur;
}

BinaryMask closing(const BinaryMask& m, int element_size, int dilations, int erosions) {
  return erode(dilate(m, element_size, dilations), element_size, erosions);
}

BinaryMask opening(const BinaryMask& m, int element_size, int erosions, int dilations) {
  return dilate(erode(m, element_size, erosions), element_size, dilations);
}

void mask_and(BinaryMask& a, const BinaryMask& b) {
  for (std::size_t i = 0; i < a.bits.size(); ++i) a.bits[i] &= b.bits[i];
}

namespace {

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

void unite(std::vector<int>& parent, int a, int b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a == b) return;
  if (a < b)
    parent[b] = a;
  else
    parent[a] = b;
}

// Sum of k and k^2 for k in [a, b).
inline void run_sums(int a, int b, double& s1, double& s2) {
  auto S1 = [](double n) { return n * (n + 1) / 2; };
  auto S2 = [](double n) { return n * (n + 1) * (2 * n + 1) / 6; };
  s1 = S1(b - 1) - S1(a - 1);
  s2 = S2(b - 1) - S2(a - 1);
}

}  // namespace

std::vector<Blob> connected_components(const BinaryMask& m, bool with_circle) {
  std::vector<Run> runs;
  std::vector<std::size_t> row_start(m.height + 1, 0);
  for (int y = 0; y < m.height; ++y) {
    row_start[y] = runs.size();
    const std::uint8_t* r = m.row(y);
    int x = 0;
    while (x < m.width) {
      if (!r[x]) {
        ++x;
        continue;
      }
      const int x0 = x;
      while (x < m.width && r[x]) ++x;
      runs.push_back({y, x0, x});
    }
  }
  row_start[m.height] = runs.size();

  std::vector<int> parent(runs.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (int y = 1; y < m.height; ++y) {
    std::size_t p = row_start[y - 1];
    const std::size_t pend = row_start[y];
    for (std::size_t c = row_start[y]; c < row_start[y + 1]; ++c) {
      const Run& cur = runs[c];
      while (p < pend && runs[p].x1 < cur.x0) ++p;
      for (std::size_t q = p; q < pend && runs[q].x0 <= cur.x1; ++q)
        unite(parent, static_cast<int>(q), static_cast<int>(c));
    }
  }

  std::vector<int> blob_of(runs.size(), -1);
  std::vector<Blob> blobs;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const int root = find_root(parent, static_cast<int>(i));
    if (blob_of[root] < 0) {
      blob_of[root] = static_cast<int>(blobs.size());
      blobs.emplace_back();
    }
    blobs[blob_of[root]].runs.push_back(runs[i]);
  }

  for (Blob& b : blobs) {
    double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    int x0 = m.width, y0 = m.height, x1 = 0, y1 = 0;
    for (const Run& r : b.runs) {
      double s1, s2;
      run_sums(r.x0, r.x1, s1, s2);
      const double len = r.x1 - r.x0;
      n += len;
      sx += s1;
      sxx += s2;
      sy += len * r.y;
      syy += len * r.y * static_cast<double>(r.y);
      sxy += s1 * r.y;
      x0 = std::min(x0, r.x0);
      x1 = std::max(x1, r.x1);
      y0 = std::min(y0, r.y);
      y1 = std::max(y1, r.y + 1);
    }
    b.area = static_cast<std::int64_t>(n);
    b.centroid = {sx / n, sy / n};
    b.bbox = {x0, y0, x1, y1};
    const double cxx = sxx / n - b.centroid.x * b.centroid.x + 1.0 / 12.0;
    const double cyy = syy / n - b.centroid.y * b.centroid.y + 1.0 / 12.0;
    const double cxy = sxy / n - b.centroid.x * b.centroid.y;
    b.ellipse = ellipse_from_moments(b.centroid, cxx, cyy, cxy);
    if (with_circle) b.enclosing = blob_enclosing_circle(b);
  }
  return blobs;
}

Circle blob_enclosing_circle(const Blob& b) {
  std::vector<Point2d> pts;
  pts.reserve(b.runs.size() * 2);
  for (const Run& r : b.runs) {
    pts.push_back({static_cast<double>(r.x0), static_cast<double>(r.y)});
    if (r.x1 - 1 != r.x0) pts.push_back({static_cast<double>(r.x1 - 1), static_cast<double>(r.y)});
  }
  return min_enclosing_circle(std::move(pts));
}

void paint_blob(BinaryMask& m, const Blob& b) {
  for (const Run& r : b.runs) std::fill(m.row(r.y) + r.x0, m.row(r.y) + r.x1, std::uint8_t{1});
}

}  // namespace arenatrack

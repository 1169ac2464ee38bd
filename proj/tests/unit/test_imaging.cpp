#include <gtest/gtest.h>

#include <random>
#include <set>

#include "arenatrack/imaging.hpp"
#include "arenatrack/kernels.hpp"

using namespace arenatrack;

namespace {

Frame random_frame(int w, int h, unsigned seed, int lo = 0, int hi = 255) {
  Frame f(w, h);
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> d(lo, hi);
  for (auto& p : f.pixels) p = static_cast<std::uint8_t>(d(rng));
  return f;
}

BinaryMask random_mask(int w, int h, unsigned seed, double density) {
  BinaryMask m(w, h);
  std::mt19937 rng(seed);
  std::bernoulli_distribution d(density);
  for (auto& b : m.bits) b = d(rng) ? 1 : 0;
  return m;
}

// Brute-force set dilation with the same disc element, zero padding.
BinaryMask dilate_oracle(const BinaryMask& m, int size) {
  const auto hw = kernels::disc_half_widths(size);
  const int r = static_cast<int>(hw.size()) / 2;
  BinaryMask out(m.width, m.height);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -hw[dy + r]; dx <= hw[dy + r]; ++dx) {
          const int sx = x + dx, sy = y + dy;
          if (sx >= 0 && sy >= 0 && sx < m.width && sy < m.height && m.at(sx, sy)) out.at(x, y) = 1;
        }
  return out;
}

// Erosion treats outside pixels as set so borders do not erode.
BinaryMask erode_oracle(const BinaryMask& m, int size) {
  const auto hw = kernels::disc_half_widths(size);
  const int r = static_cast<int>(hw.size()) / 2;
  BinaryMask out(m.width, m.height);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      bool all = true;
      for (int dy = -r; dy <= r && all; ++dy)
        for (int dx = -hw[dy + r]; dx <= hw[dy + r] && all; ++dx) {
          const int sx = x + dx, sy = y + dy;
          if (sx >= 0 && sy >= 0 && sx < m.width && sy < m.height && !m.at(sx, sy)) all = false;
        }
      out.at(x, y) = all ? 1 : 0;
    }
  return out;
}

}  // namespace

TEST(Normalize, ConstantFrameMapsToZero) {
  const Frame out = normalize(Frame(8, 8, 128));
  for (auto p : out.pixels) EXPECT_EQ(p, 0);
}

TEST(Normalize, LinearStretch) {
  Frame f(3, 1);
  f.pixels = {50, 100, 150};
  const Frame out = normalize(f);
  EXPECT_EQ(out.pixels[0], 0);
  EXPECT_EQ(out.pixels[1], 128);  // round(255 * 50 / 100)
  EXPECT_EQ(out.pixels[2], 255);
}

TEST(Blur, DefaultSizeChangesNonConstantFrame) {
  const Frame f = random_frame(32, 32, 1);
  EXPECT_NE(gaussian_blur(f, 5).pixels, f.pixels);
  EXPECT_EQ(gaussian_blur(Frame(16, 16, 77), 5).pixels, Frame(16, 16, 77).pixels);
}

TEST(Blur, SigmaRule) { EXPECT_DOUBLE_EQ(gaussian_sigma(5), 0.3 * (2 - 1) + 0.8); }

TEST(Threshold, StrictBelow) {
  EXPECT_EQ(threshold_below(Frame(4, 4, 255), 90).count(), 0);
  Frame f(3, 1);
  f.pixels = {30, 90, 150};
  const BinaryMask m = threshold_below(f, 90);
  EXPECT_EQ(m.bits, (std::vector<std::uint8_t>{1, 0, 0}));
}

TEST(Threshold, OtsuMatchesExhaustiveOracle) {
  Frame f(40, 40);
  std::mt19937 rng(3);
  std::normal_distribution<double> dark(60, 10), bright(190, 12);
  for (auto& p : f.pixels) p = static_cast<std::uint8_t>(std::clamp(rng() % 3 ? bright(rng) : dark(rng), 0.0, 255.0));
  // Between-class variance for the split {I < t} vs {I >= t}.
  std::vector<double> hist(256, 0);
  for (auto p : f.pixels) hist[p] += 1;
  const double n = static_cast<double>(f.pixels.size());
  double best = -1;
  int best_t = 0;
  for (int t = 1; t < 256; ++t) {
    double w0 = 0, s0 = 0, s1 = 0;
    for (int v = 0; v < t; ++v) w0 += hist[v], s0 += v * hist[v];
    for (int v = t; v < 256; ++v) s1 += v * hist[v];
    const double w1 = n - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double d = s0 / w0 - s1 / w1;
    const double var = w0 * w1 * d * d;
    if (var > best + 1e-9) best = var, best_t = t;
  }
  const BinaryMask expected = threshold_below(f, best_t);
  EXPECT_EQ(threshold_below(f, 0).bits, expected.bits);
}

TEST(Morphology, ClosingKeepsConvexSquare) {
  BinaryMask m(20, 20);
  for (int y = 5; y < 15; ++y)
    for (int x = 5; x < 15; ++x) m.at(x, y) = 1;
  EXPECT_EQ(closing(m, 3, 1, 1).bits, m.bits);
  EXPECT_EQ(closing(m, 5, 2, 2).bits, m.bits);
}

TEST(Morphology, ClosingFillsHole) {
  BinaryMask m(5, 5, true);
  m.at(2, 2) = 0;
  EXPECT_EQ(closing(m, 3, 1, 1).count(), 25);
}

TEST(Morphology, MatchesBruteForceOracle) {
  for (int size : {1, 3, 5, 7}) {
    const BinaryMask m = random_mask(23, 17, 10 + size, 0.4);
    EXPECT_EQ(dilate(m, size).bits, dilate_oracle(m, size).bits) << size;
    EXPECT_EQ(erode(m, size).bits, erode_oracle(m, size).bits) << size;
  }
}

TEST(Kernels, ParallelMatchesReference) {
  const Frame f = random_frame(97, 61, 5);
  const BinaryMask m = random_mask(97, 61, 6, 0.5);
  for (int t : {1, 2, 3}) {
    kernels::set_threads(t);
    Frame a, b;
    kernels::normalize(f, a);
    kernels::reference::normalize(f, b);
    EXPECT_EQ(a.pixels, b.pixels);
    kernels::gaussian_blur(f, a, 7);
    kernels::reference::gaussian_blur(f, b, 7);
    EXPECT_EQ(a.pixels, b.pixels);
    BinaryMask ma, mb;
    kernels::threshold_below(f, 100, ma);
    kernels::reference::threshold_below(f, 100, mb);
    EXPECT_EQ(ma.bits, mb.bits);
    kernels::dilate(m, ma, 5);
    kernels::reference::dilate(m, mb, 5);
    EXPECT_EQ(ma.bits, mb.bits);
    kernels::erode(m, ma, 5);
    kernels::reference::erode(m, mb, 5);
    EXPECT_EQ(ma.bits, mb.bits);
    kernels::RemapTable tab{97, 61, std::vector<float>(97 * 61), std::vector<float>(97 * 61)};
    for (int i = 0; i < 97 * 61; ++i) {
      tab.src_x[i] = static_cast<float>(i % 97) * 0.93f + 1.3f;
      tab.src_y[i] = static_cast<float>(i / 97) * 1.07f - 0.6f;
    }
    kernels::remap_bilinear(f, tab, a, 9);
    kernels::reference::remap_bilinear(f, tab, b, 9);
    EXPECT_EQ(a.pixels, b.pixels);
  }
  kernels::set_threads(1);
}

TEST(Components, EmptyAndDiagonal) {
  EXPECT_TRUE(connected_components(BinaryMask(8, 8)).empty());
  BinaryMask m(4, 4);
  m.at(1, 1) = 1;
  m.at(2, 2) = 1;
  EXPECT_EQ(connected_components(m).size(), 1u);
}

TEST(Components, MatchesFloodFillOracle) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const BinaryMask m = random_mask(16, 16, 100 + seed, 0.45);
    // Flood-fill labelling, 8-connected.
    std::vector<int> label(256, -1);
    int n = 0;
    for (int s = 0; s < 256; ++s) {
      if (!m.bits[s] || label[s] >= 0) continue;
      std::vector<int> stack{s};
      label[s] = n;
      while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int x = p % 16 + dx, y = p / 16 + dy;
            if (x < 0 || y < 0 || x >= 16 || y >= 16) continue;
            const int q = y * 16 + x;
            if (m.bits[q] && label[q] < 0) label[q] = n, stack.push_back(q);
          }
      }
      ++n;
    }
    const auto blobs = connected_components(m, false);
    ASSERT_EQ(static_cast<int>(blobs.size()), n);
    std::set<int> seen;
    for (const auto& b : blobs) {
      std::set<int> labels;
      std::int64_t area = 0;
      b.for_each_pixel([&](int x, int y) {
        labels.insert(label[y * 16 + x]);
        ++area;
      });
      ASSERT_EQ(labels.size(), 1u);
      EXPECT_TRUE(seen.insert(*labels.begin()).second);
      EXPECT_EQ(area, b.area);
      EXPECT_EQ(area, std::count(label.begin(), label.end(), *labels.begin()));
    }
  }
}

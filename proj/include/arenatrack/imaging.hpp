#pragma once

#include <cstdint>
#include <vector>

#include "arenatrack/frame.hpp"
#include "arenatrack/geometry.hpp"

namespace arenatrack {

// Linear contrast stretch to [0,255]; a constant frame maps to all zeros.
Frame normalize(const Frame& in);

// Gaussian blur with an odd kernel size (0 or 1 = copy), replicated borders.
// Sigma follows the usual size-derived rule 0.3*((size-1)/2 - 1) + 0.8.
Frame gaussian_blur(const Frame& in, int size);

double gaussian_sigma(int size);

Frame normalize_and_blur(const Frame& in, int gaussian_size, bool normalize_first);

// Threshold t for which mask = (I < t) is Otsu's optimal split. Only pixels
// inside `region` contribute when it is given.
int otsu_threshold(const Frame& f, const BinaryMask* region = nullptr);

// Strict I < thre. thre == 0 selects Otsu over the whole frame.
BinaryMask threshold_below(const Frame& f, int thre);
BinaryMask threshold_at_least(const Frame& f, int thre);

BinaryMask dilate(const BinaryMask& m, int element_size, int iterations = 1);
BinaryMask erode(const BinaryMask& m, int element_size, int iterations = 1);
// Dilate `dilations` times then erode `erosions` times.
BinaryMask closing(const BinaryMask& m, int element_size, int dilations, int erosions);
// Erode `erosions` times then dilate `dilations` times.
BinaryMask opening(const BinaryMask& m, int element_size, int erosions, int dilations);

void mask_and(BinaryMask& a, const BinaryMask& b);

struct Run {
  int y = 0;
  int x0 = 0;
  int x1 = 0;  // exclusive
};

struct Blob {
  std::vector<Run> runs;
  std::int64_t area = 0;
  Point2d centroid;
  Rect bbox;
  Circle enclosing;
  Ellipse ellipse;

  template <typename F>
  void for_each_pixel(F&& f) const {
    for (const Run& r : runs)
      for (int x = r.x0; x < r.x1; ++x) f(x, r.y);
  }
};

// 8-connected components in raster order of their first pixel. Centroid,
// area, bbox and moments are always filled; the enclosing circle only when
// `with_circle` is set.
std::vector<Blob> connected_components(const BinaryMask& m, bool with_circle = true);

void paint_blob(BinaryMask& m, const Blob& b);
Circle blob_enclosing_circle(const Blob& b);

}  // namespace arenatrack

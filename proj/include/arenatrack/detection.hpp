#pragma once

#include <cstdint>
#include <vector>

#include "arenatrack/arena.hpp"
#include "arenatrack/frame.hpp"
#include "arenatrack/imaging.hpp"

namespace arenatrack {

struct DetectionParams {
  int thre = 90;  // 0 = Otsu over the tracking area
  int opcl = 0;   // 0 opening, 1 closing
  int elms = 3;
  int dilt = 2;
  int erot = 2;
  int erdi = 0;  // 0 dilation, 1 erosion
  int elss = 0;
  int ertt = 0;
  bool filt = true;
  double mins = 150, maxs = 1500;
  double minr = 0, maxr = 0;
  double mish = 0, mash = 0;
  double minf = 0;

  void validate() const;
};

struct DetectionRecord {
  Point2d centroid;  // frame coordinates
  std::int64_t size = 0;
  std::int64_t frame = 0;
  Blob blob;         // arena-local coordinates
  Point2d offset;    // arena rect origin
};

double axis_ratio(const Blob& b);
double fill_rate(const Blob& b);

// Filter predicates; each returns true when the blob survives.
bool passes_size(const Blob& b, const DetectionParams& p);
bool passes_radius(const Blob& b, const DetectionParams& p);
bool passes_shape(const Blob& b, const DetectionParams& p);
bool passes_fill(const Blob& b, const DetectionParams& p);
bool passes_filters(const Blob& b, const DetectionParams& p);

// Candidate mask before component extraction, arena-local.
BinaryMask candidate_mask(const Frame& arena_frame, const BinaryMask& area, const BinaryMask& foreground,
                          const DetectionParams& p);

struct Candidate {
  Blob blob;
  bool passed = false;
};
std::vector<Candidate> segment(const Frame& arena_frame, const Arena& arena, const BinaryMask& foreground,
                               const DetectionParams& p);

// Survivors ordered by descending size; arena_frame is the arena crop.
std::vector<DetectionRecord> detect(const Frame& arena_frame, const Arena& arena, const BinaryMask& foreground,
                                    const DetectionParams& p);

}  // namespace arenatrack

#include "arenatrack/detection.hpp"

#include <algorithm>
#include <limits>

#include "arenatrack/errors.hpp"

namespace arenatrack {

void DetectionParams::validate() const {
  if (thre < 0 || thre > 255) throw ConfigError("det.thre must be in [0, 255]");
  if (mins > 0 && maxs > 0 && mins > maxs) throw ConfigError("det.mins exceeds det.maxs");
  if (minr > 0 && maxr > 0 && minr > maxr) throw ConfigError("det.minr exceeds det.maxr");
  if (mish > 0 && mash > 0 && mish > mash) throw ConfigError("det.mish exceeds det.mash");
  if (elms < 0 || elss < 0 || dilt < 0 || erot < 0 || ertt < 0) throw ConfigError("negative morphology parameter");
}

double axis_ratio(const Blob& b) {
  if (b.ellipse.minor_r <= 0) return std::numeric_limits<double>::infinity();
  return b.ellipse.major_r / b.ellipse.minor_r;
}

double fill_rate(const Blob& b) {
  const double a = b.ellipse.area();
  return a > 0 ? static_cast<double>(b.area) / a : 0.0;
}

bool passes_size(const Blob& b, const DetectionParams& p) {
  return (p.mins <= 0 || b.area >= p.mins) && (p.maxs <= 0 || b.area <= p.maxs);
}

bool passes_radius(const Blob& b, const DetectionParams& p) {
  return (p.minr <= 0 || b.enclosing.radius >= p.minr) && (p.maxr <= 0 || b.enclosing.radius <= p.maxr);
}

bool passes_shape(const Blob& b, const DetectionParams& p) {
  const double r = axis_ratio(b);
  return (p.mish <= 0 || r >= p.mish) && (p.mash <= 0 || r <= p.mash);
}

bool passes_fill(const Blob& b, const DetectionParams& p) { return p.minf <= 0 || fill_rate(b) >= p.minf; }

bool passes_filters(const Blob& b, const DetectionParams& p) {
  if (!p.filt) return true;
  return passes_size(b, p) && passes_radius(b, p) && passes_shape(b, p) && passes_fill(b, p);
}

BinaryMask candidate_mask(const Frame& f, const BinaryMask& area, const BinaryMask& fg, const DetectionParams& p) {
  const int thre = p.thre == 0 ? otsu_threshold(f, &area) : p.thre;
  BinaryMask m = threshold_below(f, thre);
  mask_and(m, area);
  mask_and(m, fg);
  if (p.elms > 1 && (p.dilt > 0 || p.erot > 0))
    m = p.opcl == 0 ? opening(m, p.elms, p.erot, p.dilt) : closing(m, p.elms, p.dilt, p.erot);
  if (p.elss > 1 && p.ertt > 0) m = p.erdi == 0 ? dilate(m, p.elss, p.ertt) : erode(m, p.elss, p.ertt);
  return m;
}

std::vector<Candidate> segment(const Frame& f, const Arena& arena, const BinaryMask& fg, const DetectionParams& p) {
  std::vector<Candidate> out;
  for (Blob& b : connected_components(candidate_mask(f, arena.area.mask, fg, p), false)) {
    Candidate c;
    // The enclosing circle is the costly part; skip it for blobs already rejected by size.
    if (!p.filt || passes_size(b, p)) b.enclosing = blob_enclosing_circle(b);
    c.passed = passes_filters(b, p);
    c.blob = std::move(b);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<DetectionRecord> detect(const Frame& f, const Arena& arena, const BinaryMask& fg,
                                    const DetectionParams& p) {
  std::vector<DetectionRecord> out;
  for (Candidate& c : segment(f, arena, fg, p)) {
    if (!c.passed) continue;
    DetectionRecord d;
    d.offset = {static_cast<double>(arena.rect.x0), static_cast<double>(arena.rect.y0)};
    d.centroid = {c.blob.centroid.x + d.offset.x, c.blob.centroid.y + d.offset.y};
    d.size = c.blob.area;
    d.frame = f.index;
    d.blob = std::move(c.blob);
    out.push_back(std::move(d));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const DetectionRecord& a, const DetectionRecord& b) { return a.size > b.size; });
  return out;
}

}  // namespace arenatrack

#include "arenatrack/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace arenatrack {

TcmMap::TcmMap(int rows, int cols, int width_code) : rows_(rows), cols_(cols) {
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  if (width_code <= 0)
    cells_ = std::vector<std::uint8_t>(n, 0);
  else if (width_code == 1)
    cells_ = std::vector<std::uint16_t>(n, 0);
  else
    cells_ = std::vector<std::uint32_t>(n, 0);
}

std::uint32_t TcmMap::get(std::size_t i) const {
  return std::visit([i](const auto& v) { return static_cast<std::uint32_t>(v[i]); }, cells_);
}

void TcmMap::increment(int r, int c) {
  const std::size_t i = static_cast<std::size_t>(r) * cols_ + c;
  std::visit(
      [i](auto& v) {
        using T = typename std::decay_t<decltype(v)>::value_type;
        if (v[i] < std::numeric_limits<T>::max()) ++v[i];
      },
      cells_);
}

std::size_t TcmMap::bytes_per_cell() const {
  return std::visit([](const auto& v) { return sizeof(typename std::decay_t<decltype(v)>::value_type); }, cells_);
}

int intensity_bin(int value, int bins) {
  return std::min(bins - 1, static_cast<int>(std::floor(value * bins / 255.0)));
}

int sum_bin(int value_sum, int bins) {
  return std::min(bins - 1, static_cast<int>(std::floor(value_sum * bins / 510.0)));
}

BodyFeatures extract_features(const Blob& blob, const Frame& frame, std::int64_t frame_index,
                              const FeatureParams& p) {
  BodyFeatures f;
  f.hist.assign(p.hiss, 0);
  f.icm = TcmMap(p.tcmr, p.hiss, p.tcmd);
  f.ccm = TcmMap(p.tcmr, p.hiss, p.tcmd);
  f.size = blob.area;
  f.frame = frame_index;
  const int cx = std::clamp(static_cast<int>(std::lround(blob.centroid.x)), 0, frame.width - 1);
  const int cy = std::clamp(static_cast<int>(std::lround(blob.centroid.y)), 0, frame.height - 1);
  const int fc = frame.at(cx, cy);
  blob.for_each_pixel([&](int x, int y) {
    const int fp = frame.at(x, y);
    ++f.hist[intensity_bin(fp, p.hiss)];
    const double dx = x - blob.centroid.x, dy = y - blob.centroid.y;
    const int d = static_cast<int>(std::lround(std::sqrt(dx * dx + dy * dy)));
    if (d >= p.tcmr) return;
    f.icm.increment(d, sum_bin(fp + fc, p.hiss));
    f.ccm.increment(d, intensity_bin(std::abs(fp - fc), p.hiss));
  });
  return f;
}

void FeatureStore::add(BodyFeatures f) {
  samples_.push_back(std::move(f));
  if (cap_ > 0 && static_cast<int>(samples_.size()) > cap_) thin();
}

void FeatureStore::merge(const FeatureStore& other) {
  for (const auto& s : other.samples_) samples_.push_back(s);
  std::stable_sort(samples_.begin(), samples_.end(),
                   [](const BodyFeatures& a, const BodyFeatures& b) { return a.frame < b.frame; });
  while (cap_ > 0 && static_cast<int>(samples_.size()) > cap_) thin();
}

void FeatureStore::thin() {
  std::size_t w = 0;
  for (std::size_t i = 0; i < samples_.size(); i += 2) samples_[w++] = std::move(samples_[i]);
  samples_.resize(w);
}

double pearson(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n == 0) return 0.0;
  double sa = 0, sb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sa += a[i];
    sb += b[i];
  }
  const double ma = sa / n, mb = sb / n;
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = a[i] - ma, y = b[i] - mb;
    num += x * y;
    da += x * x;
    db += y * y;
  }
  if (da == 0 || db == 0) return (da == 0 && db == 0 && a == b) ? 1.0 : 0.0;
  return num / std::sqrt(da * db);
}

double map_ncc(const TcmMap& a, const TcmMap& b) {
  if (a.size() == 0 || a.size() != b.size()) return 0.0;
  return std::visit(
      [](const auto& va, const auto& vb) {
        const std::size_t n = va.size();
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        bool same = true;
        for (std::size_t i = 0; i < n; ++i) {
          const double x = va[i], y = vb[i];
          sa += x;
          sb += y;
          saa += x * x;
          sbb += y * y;
          sab += x * y;
          same = same && x == y;
        }
        const double ca = saa - sa * sa / n, cb = sbb - sb * sb / n;
        if (ca <= 1e-12 || cb <= 1e-12) return (ca <= 1e-12 && cb <= 1e-12 && same) ? 1.0 : 0.0;
        return (sab - sa * sb / n) / std::sqrt(ca * cb);
      },
      a.cells(), b.cells());
}

}  // namespace arenatrack

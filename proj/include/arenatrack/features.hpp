#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "arenatrack/frame.hpp"
#include "arenatrack/imaging.hpp"

namespace arenatrack {

struct FeatureParams {
  int hiss = 20;   // histogram bins
  int tcmr = 25;   // distance axis length of the center maps
  int tcmd = 0;    // 0 = 8-bit, 1 = 16-bit, 2 = 32-bit map cells
  int hist = 500;  // samples kept per store
};

// Saturating counts stored at the selected width.
class TcmMap {
 public:
  TcmMap() = default;
  TcmMap(int rows, int cols, int width_code);
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return static_cast<std::size_t>(rows_) * cols_; }
  std::uint32_t get(int r, int c) const { return get(static_cast<std::size_t>(r) * cols_ + c); }
  std::uint32_t get(std::size_t i) const;
  void increment(int r, int c);
  std::size_t bytes_per_cell() const;
  using Cells = std::variant<std::vector<std::uint8_t>, std::vector<std::uint16_t>, std::vector<std::uint32_t>>;
  const Cells& cells() const { return cells_; }

 private:
  int rows_ = 0, cols_ = 0;
  Cells cells_;
};

struct BodyFeatures {
  std::vector<std::uint32_t> hist;
  TcmMap icm;  // distance x bin(f_p + f_c)
  TcmMap ccm;  // distance x bin(|f_p - f_c|)
  std::int64_t size = 0;
  std::int64_t frame = 0;
};

int intensity_bin(int value, int bins);
int sum_bin(int value_sum, int bins);

// blob and frame share coordinates (both arena-local in the pipeline).
BodyFeatures extract_features(const Blob& blob, const Frame& frame, std::int64_t frame_index,
                              const FeatureParams& p);

// Bounded sample list; when full, every second sample is dropped.
class FeatureStore {
 public:
  explicit FeatureStore(int cap = 500) : cap_(cap) {}
  void add(BodyFeatures f);
  void merge(const FeatureStore& other);
  void clear() { samples_.clear(); samples_.shrink_to_fit(); }
  const std::vector<BodyFeatures>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  int cap() const { return cap_; }

 private:
  void thin();
  int cap_;
  std::vector<BodyFeatures> samples_;
};

double pearson(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);
double map_ncc(const TcmMap& a, const TcmMap& b);

}  // namespace arenatrack

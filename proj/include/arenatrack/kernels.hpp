#pragma once

#include <vector>

#include "arenatrack/frame.hpp"

// Raster kernels. The default versions are OpenMP-parallel; kernels::reference
// holds plain serial implementations used by tests and the benchmark.
namespace arenatrack::kernels {

void set_threads(int n);
int threads();

void normalize(const Frame& in, Frame& out);
void gaussian_blur(const Frame& in, Frame& out, int size);
void threshold_below(const Frame& in, int thre, BinaryMask& out);
void dilate(const BinaryMask& in, BinaryMask& out, int element_size);
void erode(const BinaryMask& in, BinaryMask& out, int element_size);

// Source coordinates for every destination pixel; negative x marks invalid.
struct RemapTable {
  int width = 0;
  int height = 0;
  std::vector<float> src_x;
  std::vector<float> src_y;
};
void remap_bilinear(const Frame& in, const RemapTable& table, Frame& out, std::uint8_t fill);

// Row offsets of a disc of the given diameter: half_width[dy + r] for dy in [-r, r].
std::vector<int> disc_half_widths(int element_size);

namespace reference {
void normalize(const Frame& in, Frame& out);
void gaussian_blur(const Frame& in, Frame& out, int size);
void threshold_below(const Frame& in, int thre, BinaryMask& out);
void dilate(const BinaryMask& in, BinaryMask& out, int element_size);
void erode(const BinaryMask& in, BinaryMask& out, int element_size);
void remap_bilinear(const Frame& in, const RemapTable& table, Frame& out, std::uint8_t fill);
}  // namespace reference

}  // namespace arenatrack::kernels

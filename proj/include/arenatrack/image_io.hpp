#pragma once

#include <string>
#include <vector>

#include "arenatrack/frame.hpp"

namespace arenatrack {

RgbImage to_rgb(const Frame& gray);

std::vector<std::uint8_t> encode_png(const RgbImage& img);
std::vector<std::uint8_t> encode_png(const Frame& gray);
std::vector<std::uint8_t> encode_jpeg(const RgbImage& img, int quality = 90);
void write_png(const RgbImage& img, const std::string& path);
void write_jpeg(const RgbImage& img, const std::string& path, int quality = 90);
RgbImage read_png_rgb(const std::string& path);

// Binary PGM (P5, maxval 255).
Frame read_pgm(const std::string& path);
Frame decode_pgm(const std::string& bytes, const std::string& origin);
void write_pgm(const Frame& f, const std::string& path);
std::string encode_pgm(const Frame& f);

}  // namespace arenatrack

#include "arenatrack/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "arenatrack/errors.hpp"
#include "arenatrack/text.hpp"

namespace arenatrack {

RgbImage to_rgb(const Frame& gray) {
  RgbImage out(gray.width, gray.height);
  for (std::size_t i = 0; i < gray.pixels.size(); ++i)
    out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = gray.pixels[i];
  return out;
}

namespace {

void png_append(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

std::vector<std::uint8_t> encode_png_raw(const std::uint8_t* data, int w, int h, int channels) {
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png: cannot create writer");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png: encoding failed");
  }
  png_set_write_fn(png, &out, png_append, nullptr);
  png_set_IHDR(png, info, w, h, 8, channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < h; ++y)
    png_write_row(png, const_cast<png_bytep>(data + static_cast<std::size_t>(y) * w * channels));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("cannot write " + path);
}

}  // namespace

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  return encode_png_raw(img.data.data(), img.width, img.height, 3);
}

std::vector<std::uint8_t> encode_png(const Frame& gray) {
  return encode_png_raw(gray.pixels.data(), gray.width, gray.height, 1);
}

std::vector<std::uint8_t> encode_jpeg(const RgbImage& img, int quality) {
  jpeg_compress_struct cinfo;
  jpeg_error_mgr jerr;
  cinfo.err = jpeg_std_error(&jerr);
  jpeg_create_compress(&cinfo);
  unsigned char* buf = nullptr;
  unsigned long size = 0;
  jpeg_mem_dest(&cinfo, &buf, &size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width);
  cinfo.image_height = static_cast<JDIMENSION>(img.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(img.px(0, static_cast<int>(cinfo.next_scanline)));
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  std::vector<std::uint8_t> out(buf, buf + size);
  jpeg_destroy_compress(&cinfo);
  std::free(buf);
  return out;
}

void write_png(const RgbImage& img, const std::string& path) { write_bytes(path, encode_png(img)); }
void write_jpeg(const RgbImage& img, const std::string& path, int quality) {
  write_bytes(path, encode_jpeg(img, quality));
}

RgbImage read_png_rgb(const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) throw IoError("cannot read png " + path);
  image.format = PNG_FORMAT_RGB;
  RgbImage out(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, out.data.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError("cannot decode png " + path);
  }
  return out;
}

Frame decode_pgm(const std::string& bytes, const std::string& origin) {
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  if (token() != "P5") throw IoError(origin + ": not a binary PGM (P5)");
  const auto w = parse_integer(token());
  const auto h = parse_integer(token());
  const auto maxval = parse_integer(token());
  if (!w || !h || !maxval || *w <= 0 || *h <= 0) throw IoError(origin + ": malformed PGM header");
  if (*maxval != 255) throw IoError(origin + ": PGM maxval must be 255");
  ++pos;
  const std::size_t n = static_cast<std::size_t>(*w) * static_cast<std::size_t>(*h);
  if (bytes.size() < pos + n) throw IoError(origin + ": truncated PGM data");
  Frame f(static_cast<int>(*w), static_cast<int>(*h));
  std::memcpy(f.pixels.data(), bytes.data() + pos, n);
  return f;
}

Frame read_pgm(const std::string& path) { return decode_pgm(read_file(path), path); }

std::string encode_pgm(const Frame& f) {
  std::string out = "P5\n" + std::to_string(f.width) + " " + std::to_string(f.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(f.pixels.data()), f.pixels.size());
  return out;
}

void write_pgm(const Frame& f, const std::string& path) { write_file(path, encode_pgm(f)); }

}  // namespace arenatrack

#include "arenatrack/frame_source.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "arenatrack/errors.hpp"
#include "arenatrack/image_io.hpp"
#include "arenatrack/synth.hpp"
#include "arenatrack/text.hpp"

namespace fs = std::filesystem;

namespace arenatrack {

namespace {

Frame stamp(Frame f, std::int64_t index, double fps) {
  f.index = index;
  f.time_s = static_cast<double>(index) / fps;
  return f;
}

}  // namespace

Y8Source::Y8Source(const std::string& path) : path_(path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::string header;
  std::getline(in, header);
  const auto t = split_ws(header);
  if (t.size() != 5 || t[0] != "Y8") throw IoError(path + ": expected header 'Y8 <width> <height> <fps> <count>'");
  const auto w = parse_integer(t[1]), h = parse_integer(t[2]), n = parse_integer(t[4]);
  const auto fps = parse_number(t[3]);
  if (!w || !h || !n || !fps || *w <= 0 || *h <= 0 || *n < 0 || *fps <= 0) throw IoError(path + ": malformed Y8 header");
  w_ = static_cast<int>(*w);
  h_ = static_cast<int>(*h);
  n_ = *n;
  fps_ = *fps;
  data_offset_ = in.tellg();
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  if (size - data_offset_ < static_cast<std::streamoff>(n_) * w_ * h_) throw IoError(path + ": truncated Y8 data");
}

Frame Y8Source::frame(std::int64_t index) {
  if (index < 0 || index >= n_) throw IoError(path_ + ": frame " + std::to_string(index) + " out of range");
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw IoError("cannot read " + path_);
  Frame f(w_, h_);
  in.seekg(data_offset_ + static_cast<std::streamoff>(index) * w_ * h_);
  in.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(f.pixels.size()));
  if (!in) throw IoError(path_ + ": short read at frame " + std::to_string(index));
  return stamp(std::move(f), index, fps_);
}

long long trailing_number(const std::string& stem) {
  std::size_t i = stem.size();
  while (i > 0 && std::isdigit(static_cast<unsigned char>(stem[i - 1]))) --i;
  if (i == stem.size()) return -1;
  return std::stoll(stem.substr(i, std::min<std::size_t>(18, stem.size() - i)));
}

PgmDirectorySource::PgmDirectorySource(const std::string& dir, double fps) : dir_(dir), fps_(fps) {
  if (!fs::is_directory(dir)) throw IoError("missing frame directory " + dir);
  std::vector<std::pair<long long, std::string>> found;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".pgm") continue;
    found.emplace_back(trailing_number(e.path().stem().string()), e.path().string());
  }
  if (found.empty()) throw IoError("no .pgm frames in " + dir);
  std::sort(found.begin(), found.end());
  for (std::size_t i = 1; i < found.size(); ++i)
    if (found[i - 1].first >= 0 && found[i].first > found[i - 1].first + 1)
      throw IoError(dir + ": missing frame file numbered " + std::to_string(found[i - 1].first + 1));
  for (const auto& [n, path] : found) {
    std::ifstream in(path, std::ios::binary);
    std::string head(64, '\0');
    in.read(head.data(), 64);
    head.resize(static_cast<std::size_t>(in.gcount()));
    const auto t = split_ws(head);
    if (t.size() < 3 || t[0] != "P5") throw IoError(path + ": not a binary PGM (P5)");
    const int w = static_cast<int>(parse_integer(t[1]).value_or(0));
    const int h = static_cast<int>(parse_integer(t[2]).value_or(0));
    if (files_.empty()) {
      w_ = w;
      h_ = h;
    } else if (w != w_ || h != h_) {
      throw IoError(path + ": dimensions " + std::to_string(w) + "x" + std::to_string(h) + " differ from " +
                    std::to_string(w_) + "x" + std::to_string(h_));
    }
    files_.push_back(path);
  }
}

Frame PgmDirectorySource::frame(std::int64_t index) {
  if (index < 0 || index >= count()) throw IoError(dir_ + ": frame " + std::to_string(index) + " out of range");
  return stamp(read_pgm(files_[static_cast<std::size_t>(index)]), index, fps_);
}

ConcatSource::ConcatSource(std::vector<std::unique_ptr<FrameSource>> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw IoError("sequence has no files");
  for (const auto& p : parts_) {
    if (p->width() != parts_.front()->width() || p->height() != parts_.front()->height())
      throw IoError(p->name() + ": dimensions differ from " + parts_.front()->name());
    starts_.push_back(total_);
    total_ += p->count();
  }
}

Frame ConcatSource::frame(std::int64_t index) {
  if (index < 0 || index >= total_) throw IoError(name() + ": frame " + std::to_string(index) + " out of range");
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), index) - 1;
  const std::size_t k = static_cast<std::size_t>(it - starts_.begin());
  return stamp(parts_[k]->frame(index - *it), index, fps());
}

std::string ConcatSource::name() const {
  std::string s;
  for (const auto& p : parts_) s += (s.empty() ? "" : "+") + p->name();
  return s;
}

std::int64_t ConcatSource::global_index(int part, std::int64_t local) const {
  if (part < 0 || part >= static_cast<int>(parts_.size())) throw ConfigError("reference video index out of range");
  return starts_[static_cast<std::size_t>(part)] + local;
}

std::unique_ptr<FrameSource> open_source(const std::string& path, double default_fps) {
  if (fs::is_directory(path)) return std::make_unique<PgmDirectorySource>(path, default_fps);
  if (!fs::exists(path)) throw IoError("missing video file " + path);
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".y8") return std::make_unique<Y8Source>(path);
  if (ext == ".scene") return std::make_unique<SyntheticSource>(load_scene(path));
  throw IoError(path + ": unsupported frame source (expected a PGM directory, .y8 or .scene)");
}

void write_y8(FrameSource& src, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "Y8 " << src.width() << " " << src.height() << " " << format_number(src.fps()) << " " << src.count() << "\n";
  for (std::int64_t i = 0; i < src.count(); ++i) {
    const Frame f = src.frame(i);
    out.write(reinterpret_cast<const char*>(f.pixels.data()), static_cast<std::streamsize>(f.pixels.size()));
  }
  if (!out) throw IoError("cannot write " + path);
}

std::pair<std::int64_t, std::int64_t> analysis_window(std::int64_t count, double fps, double start_min,
                                                      double end_min) {
  const double first = std::floor(start_min * 60.0 * fps + 1e-9);
  const double last = std::floor(end_min * 60.0 * fps + 1e-9);
  const std::int64_t a = first >= static_cast<double>(count) ? count : static_cast<std::int64_t>(first);
  const std::int64_t b = last >= static_cast<double>(count) ? count : static_cast<std::int64_t>(last);
  return {a, std::max(a, b)};
}

}  // namespace arenatrack

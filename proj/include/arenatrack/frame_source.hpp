#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "arenatrack/frame.hpp"

namespace arenatrack {

// Random-access grayscale frame provider.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual int width() const = 0;
  virtual int height() const = 0;
  virtual double fps() const = 0;
  virtual std::int64_t count() const = 0;
  // index and time_s of the returned frame are set by the source.
  virtual Frame frame(std::int64_t index) = 0;
  virtual std::string name() const = 0;
};

// Raw stream: text header "Y8 <width> <height> <fps> <count>\n" then count frames.
class Y8Source : public FrameSource {
 public:
  explicit Y8Source(const std::string& path);
  int width() const override { return w_; }
  int height() const override { return h_; }
  double fps() const override { return fps_; }
  std::int64_t count() const override { return n_; }
  Frame frame(std::int64_t index) override;
  std::string name() const override { return path_; }

 private:
  std::string path_;
  int w_ = 0, h_ = 0;
  double fps_ = 0;
  std::int64_t n_ = 0;
  std::streamoff data_offset_ = 0;
};

// Directory of P5 files ordered by the trailing number of their names.
class PgmDirectorySource : public FrameSource {
 public:
  PgmDirectorySource(const std::string& dir, double fps);
  int width() const override { return w_; }
  int height() const override { return h_; }
  double fps() const override { return fps_; }
  std::int64_t count() const override { return static_cast<std::int64_t>(files_.size()); }
  Frame frame(std::int64_t index) override;
  std::string name() const override { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::string dir_;
  std::vector<std::string> files_;
  int w_ = 0, h_ = 0;
  double fps_ = 0;
};

// Several files of one sequence played back to back.
class ConcatSource : public FrameSource {
 public:
  explicit ConcatSource(std::vector<std::unique_ptr<FrameSource>> parts);
  int width() const override { return parts_.front()->width(); }
  int height() const override { return parts_.front()->height(); }
  double fps() const override { return parts_.front()->fps(); }
  std::int64_t count() const override { return total_; }
  Frame frame(std::int64_t index) override;
  std::string name() const override;
  // Global index of frame `local` in part `part`.
  std::int64_t global_index(int part, std::int64_t local) const;

 private:
  std::vector<std::unique_ptr<FrameSource>> parts_;
  std::vector<std::int64_t> starts_;
  std::int64_t total_ = 0;
};

// Chooses the reader from the path: directory (PGM), *.y8, *.scene (synthetic).
std::unique_ptr<FrameSource> open_source(const std::string& path, double default_fps);

void write_y8(FrameSource& src, const std::string& path);

// Trailing decimal number of a file stem, or -1.
long long trailing_number(const std::string& stem);

// First/last frame of the analysis window given start/end minutes.
std::pair<std::int64_t, std::int64_t> analysis_window(std::int64_t count, double fps, double start_min,
                                                      double end_min);

}  // namespace arenatrack

#include "arenatrack/project.hpp"

#include <filesystem>
#include <sstream>

#include "arenatrack/arena.hpp"
#include "arenatrack/errors.hpp"
#include "arenatrack/text.hpp"

namespace fs = std::filesystem;

namespace arenatrack {

namespace {

constexpr const char* kOutputVersion = "arenatrack output 1";

std::vector<std::string> content_lines(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& l : split_lines(text)) out.push_back(trim(l));
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

std::string where(const std::string& origin, std::size_t line) { return origin + ":" + std::to_string(line + 1); }

}  // namespace

std::vector<SequenceInput> parse_input(const std::string& text, const std::string& origin) {
  const auto lines = content_lines(text);
  std::size_t i = 0;
  auto next_count = [&](const char* what) {
    if (i >= lines.size()) throw ConfigError(origin + ": missing " + what);
    const auto n = parse_integer(lines[i]);
    if (!n || *n < 1) throw ConfigError(where(origin, i) + ": expected " + what);
    ++i;
    return static_cast<int>(*n);
  };
  std::vector<SequenceInput> out;
  const int nseq = next_count("sequence count");
  for (int s = 0; s < nseq; ++s) {
    SequenceInput seq;
    const int nfiles = next_count("file count");
    for (int f = 0; f < nfiles; ++f) {
      if (i >= lines.size()) throw ConfigError(origin + ": missing file line for sequence " + std::to_string(s + 1));
      std::string line = lines[i];
      if (f == nfiles - 1) {
        // Last file line ends with "<reference video> <reference frame>".
        auto parts = split_ws(line);
        if (parts.size() >= 3) {
          const auto rv = parse_integer(parts[parts.size() - 2]);
          const auto rf = parse_integer(parts.back());
          if (rv && rf) {
            if (*rv < 0 || *rv >= nfiles || *rf < 0)
              throw ConfigError(where(origin, i) + ": reference video/frame out of range");
            seq.ref_video = static_cast<int>(*rv);
            seq.ref_frame = *rf;
            std::size_t end = line.size();
            for (int k = 0; k < 2; ++k) {
              end = line.find_last_not_of(" \t", end - 1) + 1;
              end = line.find_last_of(" \t", end - 1) + 1;
            }
            line = trim(line.substr(0, end));
          }
        }
      }
      if (line.empty()) throw ConfigError(where(origin, i) + ": empty file path");
      seq.files.push_back(line);
      ++i;
    }
    out.push_back(seq);
  }
  if (i != lines.size()) throw ConfigError(where(origin, i) + ": unexpected trailing content");
  return out;
}

std::string format_input(const std::vector<SequenceInput>& seqs) {
  std::ostringstream os;
  os << seqs.size() << "\n";
  for (const auto& s : seqs) {
    os << s.files.size() << "\n";
    for (std::size_t f = 0; f < s.files.size(); ++f) {
      os << s.files[f];
      if (f + 1 == s.files.size()) os << " " << s.ref_video << " " << s.ref_frame;
      os << "\n";
    }
  }
  return os.str();
}

ProjectPaths parse_tox(const std::string& text, const std::string& origin) {
  const auto lines = content_lines(text);
  if (lines.size() != 5)
    throw ConfigError(origin + ": expected 5 lines (Input, Configuration, Arena, ArenaNames, Calibrator), got " +
                      std::to_string(lines.size()));
  return {lines[0], lines[1], lines[2], lines[3], lines[4]};
}

std::string format_tox(const ProjectPaths& p) {
  return p.input + "\n" + p.configuration + "\n" + p.arena + "\n" + p.arena_names + "\n" + p.calibrator + "\n";
}

std::string resolve_path(const std::string& base, const std::string& p) {
  const fs::path q(p);
  if (q.is_absolute()) return q.lexically_normal().string();
  return (fs::path(base) / q).lexically_normal().string();
}

std::string write_project(const std::string& dir, const Config& config, const std::vector<SequenceInput>& seqs,
                          const CameraModel* camera) {
  fs::create_directories(dir);
  const std::string name = config.text("out.pnam");
  const ProjectPaths paths{name + "_Input.txt", name + "_Configuration.txt", name + "_Arena.txt",
                           name + "_ArenaNames.txt", name + "_Calibrator.txt"};
  const fs::path d(dir);
  write_file((d / paths.input).string(), format_input(seqs));
  write_file((d / paths.configuration).string(), config.write());
  if (camera) save_calibrator(*camera, (d / paths.calibrator).string());
  const std::string tox = (d / (name + ".tox")).string();
  write_file(tox, format_tox(paths));
  return tox;
}

Project load_project(const std::string& tox_path) {
  Project pr;
  pr.tox_path = fs::absolute(tox_path).lexically_normal().string();
  pr.base_dir = fs::path(pr.tox_path).parent_path().string();
  const ProjectPaths raw = parse_tox(read_file(tox_path), tox_path);
  pr.paths = {resolve_path(pr.base_dir, raw.input), resolve_path(pr.base_dir, raw.configuration),
              resolve_path(pr.base_dir, raw.arena), resolve_path(pr.base_dir, raw.arena_names),
              resolve_path(pr.base_dir, raw.calibrator)};
  pr.config = load_configuration(pr.paths.configuration);
  const std::string colors = (fs::path(pr.base_dir) / "ColorIni.txt").string();
  if (fs::exists(colors)) pr.colors = parse_colors(read_file(colors), colors);
  pr.sequences_as_written = parse_input(read_file(pr.paths.input), pr.paths.input);
  const std::string input_dir = fs::path(pr.paths.input).parent_path().string();
  pr.sequences = pr.sequences_as_written;
  for (auto& s : pr.sequences)
    for (auto& f : s.files) f = resolve_path(input_dir, f);
  if (fs::exists(pr.paths.calibrator)) {
    pr.camera = load_calibrator(pr.paths.calibrator);
    pr.has_calibrator = true;
  } else {
    pr.camera = CameraModel::manual(1, 1);
    pr.camera.unit_name = "px";
  }
  pr.camera.distortion = restrict_distortion(pr.camera.distortion, pr.config);
  if (fs::exists(pr.paths.arena)) pr.arena_rects = load_arena_rects(pr.paths.arena);
  if (fs::exists(pr.paths.arena_names)) pr.arena_names = load_arena_names(pr.paths.arena_names);
  return pr;
}

std::string format_tracking(const std::vector<TrackingRow>& rows) {
  std::ostringstream os;
  os << "Frame\tArena\tTrack\tX (px)\tY (px)\tLabel\n";
  for (const auto& r : rows)
    os << r.frame << "\t" << r.arena << "\t" << r.track << "\t" << format_number(r.pixel.x) << "\t"
       << format_number(r.pixel.y) << "\t" << r.label << "\n";
  return os.str();
}

std::vector<TrackingRow> parse_tracking(const std::string& text, const std::string& origin) {
  std::vector<TrackingRow> rows;
  const auto lines = split_lines(text);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto t = split_ws(lines[i]);
    if (t.empty()) continue;
    if (t.size() != 6) throw ConfigError(where(origin, i) + ": expected 6 columns");
    const auto f = parse_integer(t[0]), a = parse_integer(t[1]), k = parse_integer(t[2]), l = parse_integer(t[5]);
    const auto x = parse_number(t[3]), y = parse_number(t[4]);
    if (!f || !a || !k || !l || !x || !y) throw ConfigError(where(origin, i) + ": malformed tracking row");
    rows.push_back({*f, static_cast<int>(*a), static_cast<int>(*k), {*x, *y}, static_cast<int>(*l)});
  }
  return rows;
}

std::string format_output_index(const std::vector<OutputSequence>& seqs) {
  std::ostringstream os;
  os << kOutputVersion << "\n" << seqs.size() << "\n";
  for (const auto& s : seqs) {
    os << s.tracking_files.size() << " " << s.first_frame << " " << s.end_frame << " " << format_number(s.fps) << " "
       << s.width << " " << s.height << "\n";
    for (const auto& f : s.tracking_files) os << f << "\n";
  }
  return os.str();
}

std::vector<OutputSequence> parse_output_index(const std::string& text, const std::string& origin) {
  const auto lines = content_lines(text);
  if (lines.empty() || lines[0] != kOutputVersion) throw ConfigError(origin + ": not an output index");
  std::size_t i = 1;
  if (i >= lines.size()) throw ConfigError(origin + ": missing sequence count");
  const auto n = parse_integer(lines[i++]);
  if (!n || *n < 0) throw ConfigError(where(origin, 1) + ": bad sequence count");
  std::vector<OutputSequence> out;
  for (long long s = 0; s < *n; ++s) {
    if (i >= lines.size()) throw ConfigError(origin + ": truncated");
    const auto t = split_ws(lines[i]);
    if (t.size() != 6) throw ConfigError(where(origin, i) + ": expected 6 fields");
    OutputSequence o;
    const auto na = parse_integer(t[0]);
    o.first_frame = parse_integer(t[1]).value_or(0);
    o.end_frame = parse_integer(t[2]).value_or(0);
    o.fps = parse_number(t[3]).value_or(25);
    o.width = static_cast<int>(parse_integer(t[4]).value_or(0));
    o.height = static_cast<int>(parse_integer(t[5]).value_or(0));
    if (!na) throw ConfigError(where(origin, i) + ": bad arena count");
    ++i;
    for (long long a = 0; a < *na; ++a) {
      if (i >= lines.size()) throw ConfigError(origin + ": truncated");
      o.tracking_files.push_back(lines[i++]);
    }
    out.push_back(o);
  }
  return out;
}

}  // namespace arenatrack

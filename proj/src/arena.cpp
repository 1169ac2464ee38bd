#include "arenatrack/arena.hpp"

#include <algorithm>
#include <sstream>

#include "arenatrack/errors.hpp"
#include "arenatrack/imaging.hpp"
#include "arenatrack/text.hpp"

namespace arenatrack {

namespace {

Rect mask_bbox(const BinaryMask& m) {
  Rect r{m.width, m.height, 0, 0};
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.at(x, y)) {
        r.x0 = std::min(r.x0, x);
        r.y0 = std::min(r.y0, y);
        r.x1 = std::max(r.x1, x + 1);
        r.y1 = std::max(r.y1, y + 1);
      }
  return r;
}

BinaryMask bright_closed(const Frame& f, const ArenaParams& p) {
  return closing(threshold_at_least(f, p.thre), p.elms, p.dilt, p.erot);
}

}  // namespace

std::string default_arena_name(int index) { return "Arena" + std::to_string(index + 1); }

std::vector<Arena> define_arenas_automatic(const Frame& reference, const ArenaParams& p) {
  const BinaryMask closed = bright_closed(reference, p);
  const auto blobs = connected_components(closed, false);
  std::vector<Arena> arenas;
  std::int64_t largest = 0;
  for (const Blob& b : blobs) {
    largest = std::max(largest, b.area);
    if (b.area < p.mins) continue;
    BinaryMask only(reference.width, reference.height);
    paint_blob(only, b);
    const auto contour = trace_outer_contour(only, b.runs.front().x0, b.runs.front().y);
    if (contour.size() < 3) continue;
    Arena a;
    a.area.polygon = approximate_polygon(contour, p.poly);
    const BinaryMask full = rasterize_polygon(a.area.polygon, reference.width, reference.height);
    a.rect = mask_bbox(full);
    a.source_rect = a.rect;
    a.area.mask = crop(full, a.rect);
    arenas.push_back(std::move(a));
  }
  if (arenas.empty())
    throw ProcessingError("no arenas found: largest bright region has " + std::to_string(largest) +
                          " pixels (roi.mins " + std::to_string(p.mins) + ", roi.thre " + std::to_string(p.thre) +
                          ")");
  std::sort(arenas.begin(), arenas.end(), [](const Arena& a, const Arena& b) {
    return a.rect.y0 != b.rect.y0 ? a.rect.y0 < b.rect.y0 : a.rect.x0 < b.rect.x0;
  });
  for (std::size_t i = 0; i < arenas.size(); ++i) {
    arenas[i].id = static_cast<int>(i);
    arenas[i].name = default_arena_name(static_cast<int>(i));
  }
  return arenas;
}

std::vector<ManualArenaOutcome> define_arenas_manual(const Frame& reference, const std::vector<Rect>& rects,
                                                     const std::vector<std::string>& names, const ArenaParams& p) {
  std::vector<ManualArenaOutcome> out;
  for (std::size_t i = 0; i < rects.size(); ++i) {
    ManualArenaOutcome o;
    const Rect user = rects[i];
    const Rect r{std::max(0, user.x0), std::max(0, user.y0), std::min(reference.width, user.x1),
                 std::min(reference.height, user.y1)};
    if (r.empty()) {
      o.error = "arena " + std::to_string(i + 1) + ": rectangle lies outside the frame";
      out.push_back(std::move(o));
      continue;
    }
    const auto blobs = connected_components(bright_closed(crop(reference, r), p), p.fite);
    const Blob* best = nullptr;
    for (const Blob& b : blobs)
      if (!best || b.area > best->area) best = &b;
    if (!best) {
      o.error = "arena " + std::to_string(i + 1) + ": no region brighter than roi.thre inside the rectangle";
      out.push_back(std::move(o));
      continue;
    }
    BinaryMask full(reference.width, reference.height);
    Arena a;
    if (p.fite) {
      Circle c = best->enclosing;
      c.center = {c.center.x + r.x0, c.center.y + r.y0};
      c.radius = std::max(0.0, c.radius - p.redr);
      a.area.circle = c;
      full = rasterize_circle(c, reference.width, reference.height);
      for (int y = 0; y < full.height; ++y)
        for (int x = 0; x < full.width; ++x)
          if (!r.contains(x, y)) full.at(x, y) = 0;
    } else {
      for (const Run& run : best->runs)
        std::fill(full.row(run.y + r.y0) + run.x0 + r.x0, full.row(run.y + r.y0) + run.x1 + r.x0, std::uint8_t{1});
    }
    a.rect = mask_bbox(full);
    if (a.rect.empty()) {
      o.error = "arena " + std::to_string(i + 1) + ": tracking area is empty";
      out.push_back(std::move(o));
      continue;
    }
    a.id = static_cast<int>(i);
    a.name = i < names.size() ? names[i] : default_arena_name(static_cast<int>(i));
    a.source_rect = user;
    a.area.mask = crop(full, a.rect);
    o.arena = std::move(a);
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<Rect> load_arena_rects(const std::string& path) {
  const auto lines = split_lines(read_file(path));
  if (lines.empty()) throw ConfigError(path + ":1: missing arena count");
  const auto n = parse_integer(trim(lines[0]));
  if (!n || *n < 0) throw ConfigError(path + ":1: bad arena count");
  std::vector<Rect> rects;
  for (long long i = 0; i < *n; ++i) {
    const std::size_t ln = static_cast<std::size_t>(i) + 1;
    if (ln >= lines.size()) throw ConfigError(path + ":" + std::to_string(ln + 1) + ": missing arena line");
    const auto t = split_ws(lines[ln]);
    std::vector<long long> v;
    for (const auto& s : t) {
      const auto k = parse_integer(s);
      if (!k) throw ConfigError(path + ":" + std::to_string(ln + 1) + ": bad coordinate '" + s + "'");
      v.push_back(*k);
    }
    if (v.size() != 4) throw ConfigError(path + ":" + std::to_string(ln + 1) + ": expected x0 y0 x1 y1");
    Rect r{static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]), static_cast<int>(v[3])};
    if (r.empty()) throw ConfigError(path + ":" + std::to_string(ln + 1) + ": empty rectangle");
    rects.push_back(r);
  }
  return rects;
}

void save_arena_rects(const std::vector<Rect>& rects, const std::string& path) {
  std::ostringstream o;
  o << rects.size() << '\n';
  for (const Rect& r : rects) o << r.x0 << ' ' << r.y0 << ' ' << r.x1 << ' ' << r.y1 << '\n';
  write_file(path, o.str());
}

std::vector<std::string> load_arena_names(const std::string& path) {
  const auto lines = split_lines(read_file(path));
  if (lines.empty()) throw ConfigError(path + ":1: missing name count");
  const auto n = parse_integer(trim(lines[0]));
  if (!n || *n < 0) throw ConfigError(path + ":1: bad name count");
  std::vector<std::string> names;
  for (long long i = 0; i < *n; ++i) {
    const std::size_t ln = static_cast<std::size_t>(i) + 1;
    if (ln >= lines.size()) throw ConfigError(path + ":" + std::to_string(ln + 1) + ": missing arena name");
    const std::string name = trim(lines[ln]);
    if (name.empty()) throw ConfigError(path + ":" + std::to_string(ln + 1) + ": empty arena name");
    if (std::find(names.begin(), names.end(), name) != names.end())
      throw ConfigError(path + ":" + std::to_string(ln + 1) + ": duplicate arena name '" + name + "'");
    names.push_back(name);
  }
  return names;
}

void save_arena_names(const std::vector<std::string>& names, const std::string& path) {
  std::ostringstream o;
  o << names.size() << '\n';
  for (const auto& n : names) o << n << '\n';
  write_file(path, o.str());
}

}  // namespace arenatrack

#include "arenatrack/calibration.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "arenatrack/errors.hpp"
#include "arenatrack/text.hpp"

namespace arenatrack {

bool DistortionCoefficients::is_zero() const {
  return k1 == 0 && k2 == 0 && k3 == 0 && k4 == 0 && k5 == 0 && k6 == 0 && p1 == 0 && p2 == 0 && s1 == 0 &&
         s2 == 0 && s3 == 0 && s4 == 0;
}

DistortionCoefficients DistortionCoefficients::restricted_to(int model) const {
  DistortionCoefficients d;
  d.k1 = k1;
  d.k2 = k2;
  d.k3 = k3;
  if (model >= 1) {
    d.p1 = p1;
    d.p2 = p2;
  }
  if (model >= 2) {
    d.k4 = k4;
    d.k5 = k5;
    d.k6 = k6;
  }
  if (model >= 3) {
    d.s1 = s1;
    d.s2 = s2;
    d.s3 = s3;
    d.s4 = s4;
  }
  return d;
}

CameraModel CameraModel::manual(double fx, double fy, double cx, double cy) {
  CameraModel m;
  m.camera_matrix = {{{fx, 0, cx}, {0, fy, cy}, {0, 0, 1}}};
  return m;
}

void CameraModel::validate() const {
  if (!(fx() > 0) || !(fy() > 0)) throw ConfigError("camera matrix needs fx > 0 and fy > 0");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double dot = 0;
      for (int k = 0; k < 3; ++k) dot += rotation[i][k] * rotation[j][k];
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-6) throw ConfigError("rotation matrix is not orthonormal");
    }
}

Point2d distort_point(Point2d p, const DistortionCoefficients& d) {
  const double x = p.x, y = p.y;
  const double r2 = x * x + y * y, r4 = r2 * r2, r6 = r4 * r2;
  const double ratio = (1 + d.k1 * r2 + d.k2 * r4 + d.k3 * r6) / (1 + d.k4 * r2 + d.k5 * r4 + d.k6 * r6);
  return {x * ratio + 2 * d.p1 * x * y + d.p2 * (r2 + 2 * x * x) + d.s1 * r2 + d.s2 * r4,
          y * ratio + d.p1 * (r2 + 2 * y * y) + 2 * d.p2 * x * y + d.s3 * r2 + d.s4 * r4};
}

UndistortResult undistort_point_checked(Point2d p, const DistortionCoefficients& d, double tol) {
  UndistortResult r;
  Point2d q = p;
  for (int it = 1; it <= 100; ++it) {
    const Point2d f = distort_point(q, d);
    const double ex = f.x - p.x, ey = f.y - p.y;
    r.residual = std::hypot(ex, ey);
    r.iterations = it;
    if (r.residual <= tol) {
      r.converged = true;
      break;
    }
    q = {q.x - ex, q.y - ey};
  }
  if (!r.converged) {
    const Point2d f = distort_point(q, d);
    r.residual = std::hypot(f.x - p.x, f.y - p.y);
    r.converged = r.residual <= tol;
  }
  r.point = q;
  return r;
}

Point2d undistort_point(Point2d p, const DistortionCoefficients& d, double tol) {
  const auto r = undistort_point_checked(p, d, tol);
  if (!r.converged)
    throw ProcessingError("undistortion did not converge in 100 iterations, residual " + format_number(r.residual));
  return r.point;
}

Point2d pixel_to_normalized(Point2d px, const CameraModel& m) {
  return {(px.x - m.cx()) / m.fx(), (px.y - m.cy()) / m.fy()};
}

Point2d normalized_to_pixel(Point2d n, const CameraModel& m) { return {n.x * m.fx() + m.cx(), n.y * m.fy() + m.cy()}; }

bool is_identity_map(const CameraModel& m) { return m.distortion.is_zero(); }

UndistortionMap build_undistortion_map(const CameraModel& m, int width, int height) {
  UndistortionMap t;
  t.width = width;
  t.height = height;
  t.src_x.resize(static_cast<std::size_t>(width) * height);
  t.src_y.resize(t.src_x.size());
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const Point2d n = pixel_to_normalized({static_cast<double>(x), static_cast<double>(y)}, m);
      const Point2d s = normalized_to_pixel(distort_point(n, m.distortion), m);
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      const bool ok = s.x >= 0 && s.y >= 0 && s.x <= width - 1 && s.y <= height - 1;
      t.src_x[i] = ok ? static_cast<float>(s.x) : -1.0f;
      t.src_y[i] = ok ? static_cast<float>(s.y) : -1.0f;
    }
  return t;
}

Frame undistort_frame(const Frame& raw, const UndistortionMap& map) {
  Frame out;
  kernels::remap_bilinear(raw, map, out, 255);
  return out;
}

// Manual mode has identity rotation and zero translation, so world = normalized.
Point2d pixel_to_world(Point2d px, const CameraModel& m) {
  const Point2d n = pixel_to_normalized(px, m);
  const auto& R = m.rotation;
  return {R[0][0] * n.x + R[0][1] * n.y + m.translation[0], R[1][0] * n.x + R[1][1] * n.y + m.translation[1]};
}

Point2d world_to_pixel(Point2d w, const CameraModel& m) {
  const auto& R = m.rotation;
  const double a = R[0][0], b = R[0][1], c = R[1][0], d = R[1][1];
  const double det = a * d - b * c;
  if (std::abs(det) < 1e-15) throw ProcessingError("rotation has a degenerate calibration-plane block");
  const double u = w.x - m.translation[0], v = w.y - m.translation[1];
  const Point2d n{(d * u - b * v) / det, (-c * u + a * v) / det};
  return normalized_to_pixel(n, m);
}

namespace {

std::vector<double> row_values(const std::vector<std::string>& lines, std::size_t idx, std::size_t want,
                               const std::string& what, const std::string& origin) {
  const std::string where = origin + ":" + std::to_string(idx + 1) + ": ";
  if (idx >= lines.size()) throw ConfigError(where + "missing " + what);
  std::vector<double> v;
  for (const auto& tok : split_ws(lines[idx])) {
    const auto d = parse_number(tok);
    if (!d) throw ConfigError(where + "bad number '" + tok + "' in " + what);
    v.push_back(*d);
  }
  if (v.size() != want)
    throw ConfigError(where + what + " needs " + std::to_string(want) + " values, got " + std::to_string(v.size()));
  return v;
}

}  // namespace

CameraModel parse_calibrator(const std::string& text, const std::string& origin) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l)) {
      if (!l.empty() && l.back() == '\r') l.pop_back();
      lines.push_back(l);
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  }
  CameraModel m;
  for (int i = 0; i < 3; ++i) {
    const auto v = row_values(lines, i, 3, "camera matrix row " + std::to_string(i + 1), origin);
    for (int j = 0; j < 3; ++j) m.camera_matrix[i][j] = v[j];
  }
  for (int i = 0; i < 3; ++i) {
    const auto v = row_values(lines, 3 + i, 3, "rotation row " + std::to_string(i + 1), origin);
    for (int j = 0; j < 3; ++j) m.rotation[i][j] = v[j];
  }
  const auto t = row_values(lines, 6, 3, "translation", origin);
  m.translation = {t[0], t[1], t[2]};
  const auto d = row_values(lines, 7, 12, "distortion coefficients", origin);
  auto& c = m.distortion;
  c.k1 = d[0];
  c.k2 = d[1];
  c.p1 = d[2];
  c.p2 = d[3];
  c.k3 = d[4];
  c.k4 = d[5];
  c.k5 = d[6];
  c.k6 = d[7];
  c.s1 = d[8];
  c.s2 = d[9];
  c.s3 = d[10];
  c.s4 = d[11];
  if (lines.size() > 8) {
    const auto toks = split_ws(lines[8]);
    if (toks.size() != 2 || toks[0] != "unit")
      throw ConfigError(origin + ":9: expected 'unit <name>'");
    m.unit_name = toks[1];
  }
  if (lines.size() > 9) throw ConfigError(origin + ":10: unexpected trailing content");
  try {
    m.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return m;
}

CameraModel load_calibrator(const std::string& path) { return parse_calibrator(read_file(path), path); }

std::string format_calibrator(const CameraModel& m) {
  std::ostringstream o;
  auto row = [&](std::initializer_list<double> v) {
    bool first = true;
    for (double x : v) {
      if (!first) o << ' ';
      o << format_number(x);
      first = false;
    }
    o << '\n';
  };
  for (const auto& r : m.camera_matrix) row({r[0], r[1], r[2]});
  for (const auto& r : m.rotation) row({r[0], r[1], r[2]});
  row({m.translation[0], m.translation[1], m.translation[2]});
  const auto& c = m.distortion;
  row({c.k1, c.k2, c.p1, c.p2, c.k3, c.k4, c.k5, c.k6, c.s1, c.s2, c.s3, c.s4});
  o << "unit " << m.unit_name << '\n';
  return o.str();
}

void save_calibrator(const CameraModel& m, const std::string& path) { write_file(path, format_calibrator(m)); }

}  // namespace arenatrack

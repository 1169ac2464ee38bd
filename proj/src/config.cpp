#include "arenatrack/config.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "arenatrack/errors.hpp"
#include "arenatrack/text.hpp"

namespace arenatrack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr ParamKind I = ParamKind::Integer;
constexpr ParamKind R = ParamKind::Real;
constexpr ParamKind T = ParamKind::Text;
constexpr ParamKind C = ParamKind::Triple;

const std::vector<ParamSpec> kConfiguration = {
    {"GENERAL_PARAMETERS", "exe.thre", "16", I, 0, 1024, "execution threads (0/1 = serial)"},
    {"CALIBRATION_PARAMETERS", "cal.size", "20", R, 0, kInf, "checkerboard square size"},
    {"CALIBRATION_PARAMETERS", "cal.cols", "10", I, 2, 1000, "pattern cols"},
    {"CALIBRATION_PARAMETERS", "cal.rows", "8", I, 2, 1000, "pattern rows"},
    {"CALIBRATION_PARAMETERS", "cal.dist", "1", I, 0, 3, "distortion model 0 rad3, 1 +tangent2, 2 +rad6, 3 +prism4"},
    {"ARENA_DEFINITION_PARAMETERS", "roi.mode", "0", I, 0, 1, "0 automatic, 1 manual"},
    {"ARENA_DEFINITION_PARAMETERS", "roi.thre", "150", I, 0, 255, "tracking area threshold"},
    {"ARENA_DEFINITION_PARAMETERS", "roi.poly", "1", R, 0, kInf, "polygon approximation accuracy"},
    {"ARENA_DEFINITION_PARAMETERS", "roi.elms", "7", I, 0, 255, "closing element size"},
    {"ARENA_DEFINITION_PARAMETERS", "roi.dilt", "1", I, 0, 100, "closing dilations"},
    {"ARENA_DEFINITION_PARAMETERS", "roi.erot", "4", I, 0, 100, "closing erosions"},
    {"ARENA_DEFINITION_PARAMETERS", "roi.mins", "100000", I, 0, kInf, "minimum arena area"},
    {"ARENA_DEFINITION_PARAMETERS", "roi.fite", "0", I, 0, 1, "fit enclosing circle (manual)"},
    {"ARENA_DEFINITION_PARAMETERS", "roi.redr", "1", R, 0, kInf, "circle radius reduction"},
    {"BACKGROUND_PARAMETERS", "bgs.mode", "0", I, 0, 1, "background subtraction"},
    {"BACKGROUND_PARAMETERS", "bgs.num", "500", I, 1, kInf, "history length"},
    {"BACKGROUND_PARAMETERS", "bgs.thre", "25", R, 0, kInf, "squared Mahalanobis threshold"},
    {"BACKGROUND_PARAMETERS", "bgs.shad", "0", I, 0, 1, "shadow model (inert)"},
    {"BACKGROUND_PARAMETERS", "bgs.numg", "5", I, 1, 16, "Gaussians per pixel"},
    {"BACKGROUND_PARAMETERS", "bgs.ratb", "0.99", R, 0, 1, "background ratio"},
    {"BACKGROUND_PARAMETERS", "bgs.lstp", "1e-06", R, -kInf, 1, "learning rate (<0 automatic)"},
    {"PREPROCESSING_PARAMETERS", "pre.gfil", "5", I, 0, 255, "Gaussian filter size (0 off)"},
    {"PREPROCESSING_PARAMETERS", "pre.norm", "0", I, 0, 1, "normalization"},
    {"DETECTION_PARAMETERS", "det.type", "0", I, 0, 0, "detection type (reserved)"},
    {"DETECTION_PARAMETERS", "det.thre", "90", I, 0, 255, "segmentation threshold (0 Otsu)"},
    {"DETECTION_OPENING_CLOSING", "det.opcl", "0", I, 0, 1, "0 opening, 1 closing"},
    {"DETECTION_OPENING_CLOSING", "det.elms", "3", I, 0, 255, "element size"},
    {"DETECTION_OPENING_CLOSING", "det.dilt", "2", I, 0, 100, "dilations"},
    {"DETECTION_OPENING_CLOSING", "det.erot", "2", I, 0, 100, "erosions"},
    {"DETECTION_DILATION_EROSION", "det.erdi", "0", I, 0, 1, "0 dilation, 1 erosion"},
    {"DETECTION_DILATION_EROSION", "det.elss", "0", I, 0, 255, "element size"},
    {"DETECTION_DILATION_EROSION", "det.ertt", "0", I, 0, 100, "iterations"},
    {"DETECTION_FILTER", "det.filt", "1", I, 0, 1, "filtering"},
    {"DETECTION_FILTER", "det.maxs", "1500", R, 0, kInf, "maximum size"},
    {"DETECTION_FILTER", "det.mins", "150", R, 0, kInf, "minimum size"},
    {"DETECTION_FILTER", "det.maxr", "0", R, 0, kInf, "maximum enclosing radius (0 off)"},
    {"DETECTION_FILTER", "det.minr", "0", R, 0, kInf, "minimum enclosing radius (0 off)"},
    {"DETECTION_FILTER", "det.mash", "0", R, 0, kInf, "maximum axis ratio (0 off)"},
    {"DETECTION_FILTER", "det.mish", "0", R, 0, kInf, "minimum axis ratio (0 off)"},
    {"DETECTION_FILTER", "det.minf", "0", R, 0, kInf, "minimum fill rate (0 off)"},
    {"KALMAN_FILTER_TYPE", "kal.mode", "2", I, 0, 10, "filter type (reserved)"},
    {"KALMAN_FILTER_PARAMS", "kal.time", "0.25", R, 0, kInf, "time increment"},
    {"KALMAN_FILTER_PARAMS", "kal.pron", "0.1", R, 0, kInf, "process noise"},
    {"KALMAN_FILTER_PARAMS", "kal.mean", "1e-05", R, 0, kInf, "measurement noise"},
    {"KALMAN_FILTER_PARAMS", "kal.errc", "0.1", R, 0, kInf, "initial error covariance"},
    {"KALMAN_FILTER_ACCEPTANCE", "kal.disf", "50", R, 0, kInf, "frame distance condition"},
    {"KALMAN_FILTER_ACCEPTANCE", "kal.sich", "0.4", R, 0, kInf, "size change condition"},
    {"KALMAN_FILTER_DELETE1", "kal.dund", "1", I, 0, kInf, "unassigned frames before inactive"},
    {"KALMAN_FILTER_DELETE2", "kal.dage", "10", I, 0, kInf, "minimum track size used"},
    {"KALMAN_FILTER_DELETE2", "kal.dmax", "8", I, 0, kInf, "minimum detections for a valid track"},
    {"KALMAN_FILTER_NUMBEROFTRACKS", "kal.ntra", "1", I, 1, 1000, "animals per arena"},
    {"KALMAN_MULTITRACKING_IDENTITY_ALGORITHM", "kal.idal", "0", I, 0, 2, "0 off, 1 histogram, 2 histogram + maps"},
    {"KALMAN_MULTITRACKING_IDENTITY_ALGORITHM", "kal.fdis", "0", R, 0, kInf, "track compatibility distance (0 auto)"},
    {"KALMAN_MULTITRACKING_COMPARISON", "kal.cmsc", "0.2", R, 0, kInf, "sample size change limit"},
    {"KALMAN_MULTITRACKING_COMPARISON", "kal.corH", "1", I, 0, 1, "correlation distributions (inert)"},
    {"KALMAN_MULTITRACKING_COMPARISON", "kal.cmhc", "0.7", R, -1, 1, "minimum sample histogram correlation"},
    {"KALMAN_MULTITRACKING_COMPARISON", "kal.corN", "100", I, 1, kInf, "distribution classes (inert)"},
    {"KALMAN_MULTITRACKING_COMPARISON", "kal.shaC", "10", R, 0, kInf, "shape alignment error (inert)"},
    {"KALMAN_MULTITRACKING_COMPARISON", "kal.shaN", "500", I, 1, kInf, "shape classes (inert)"},
    {"KALMAN_MULTITRACKING_EVALUATION", "kal.mcmp", "500", I, 1, kInf, "maximum sample comparisons"},
    {"KALMAN_MULTITRACKING_EVALUATION", "kal.mAvg", "1", I, 0, 1, "mean instead of max"},
    {"KALMAN_MULTITRACKING_EVALUATION", "kal.gStd", "0.05", R, 0, kInf, "weight decay deviation"},
    {"KALMAN_MULTITRACKING_SELECTION", "kal.rGrp", "2", I, 0, 2, "0 all tracks, 1 all groups, 2 first group"},
    {"KALMAN_MULTITRACKING_SELECTION", "kal.hOrd", "1", I, 0, 1, "high order correlation"},
    {"KALMAN_MULTITRACKING_FEATURE_PARAMETERS", "kal.hiss", "20", I, 1, 256, "histogram bins"},
    {"KALMAN_MULTITRACKING_FEATURE_PARAMETERS", "kal.tcmr", "25", I, 1, 1000, "map radius"},
    {"KALMAN_MULTITRACKING_FEATURE_PARAMETERS", "kal.tcmd", "0", I, 0, 2, "map cell width 0 8, 1 16, 2 32 bits"},
    {"KALMAN_MULTITRACKING_FEATURE_PARAMETERS", "kal.hist", "500", I, 2, kInf, "samples per track"},
    {"KALMAN_MULTITRACKING_COLLISION_PARAMETERS", "kal.advr", "0.8", R, 0, kInf, "collision distance modifier"},
    {"KALMAN_MULTITRACKING_COLLISION_PARAMETERS", "kal.advm", "10", R, 0, kInf, "minimum collision advantage"},
    {"KALMAN_MULTITRACKING_COLLISION_PARAMETERS", "kal.cnft", "20", I, 0, kInf, "conflicted track lifetime"},
    {"KALMAN_MULTITRACKING_FUSSION_PARAMETERS", "kal.tfmi", "5", I, 0, kInf, "minimum fusion age"},
    {"KALMAN_MULTITRACKING_FUSSION_PARAMETERS", "kal.tfma", "10", I, 0, kInf, "maximum fusion age"},
    {"KALMAN_MULTITRACKING_FUSSION_PARAMETERS", "kal.tdma", "10", I, 0, kInf, "maximum fusion gap"},
    {"KALMAN_MULTITRACKING_FUSSION_PARAMETERS", "kal.acor", "0.6", R, -1, 1, "minimum mean correlation"},
    {"KALMAN_MULTITRACKING_FUSSION_PARAMETERS", "kal.bcor", "0.5", R, -1, 1, "minimum best correlation"},
    {"KALMAN_MULTITRACKING_TRACK_PARAMETERS", "kal.mins", "50", I, 1, kInf, "long track length"},
    {"KALMAN_MULTITRACKING_CORRELATION_PARAMETERS", "kal.idgb", "0", R, -1, 1, "group assignment minimum"},
    {"KALMAN_MULTITRACKING_CORRELATION_PARAMETERS", "kal.idla", "0", R, -1, 1, "long track mean minimum"},
    {"KALMAN_MULTITRACKING_CORRELATION_PARAMETERS", "kal.idlb", "0", R, -1, 1, "long track best minimum"},
    {"KALMAN_MULTITRACKING_CORRELATION_PARAMETERS", "kal.idsa", "0", R, -1, 1, "short track mean minimum"},
    {"KALMAN_MULTITRACKING_CORRELATION_PARAMETERS", "kal.idsb", "0", R, -1, 1, "short track best minimum"},
    {"KALMAN_MULTITRACKING_OTHER_PARAMETERS", "kal.idff", "500", I, 2, kInf, "tracks kept before a flush"},
    {"OUTPUT_PARAMETERS", "out.step", "10", I, 1, kInf, "frames between progress updates"},
    {"OUTPUT_PARAMETERS", "out.wind", "0", I, 0, 2, "live windows (inert)"},
    {"OUTPUT_PARAMETERS", "out.ftxt", "1", I, 0, 2, "0 tracking only, 1 main stats, 2 all text files"},
    {"OUTPUT_PARAMETERS", "out.fjpg", "1", I, 0, 4, "0 none, 1 spatial stats, 2-4 per-frame images"},
    {"OUTPUT_PARAMETERS", "out.fimg", "0", I, 0, 1, "image format 0 PNG, 1 JPEG"},
    {"OUTPUT_PARAMETERS", "out.pnam", "TestProject", T, 0, 0, "project name"},
    {"DATA_ANALYSIS_ARENA", "ana.norm", "0", I, 0, 1, "normalize arenas"},
    {"DATA_ANALYSIS_ARENA", "ana.aror", "3", I, 0, 3, "0 same, 1 horizontal, 2 vertical, 3 both mirrors"},
    {"DATA_ANALYSIS_ZONE", "ana.nzon", "30", I, 1, 10000, "maximum edge zones"},
    {"DATA_ANALYSIS_ZONE", "ana.zsizq", "50", R, 0, kInf, "zone size"},
    {"DATA_ANALYSIS_SPEED", "ana.spsa", "2", I, 1, kInf, "speed sampling distance"},
    {"DATA_ANALYSIS_SPEED", "ana.mobs", "1", R, 0, kInf, "mobility speed threshold"},
    {"DATA_ANALYSIS_FROZEN", "ana.fmmt", "5", R, 0, kInf, "frozen distance"},
    {"DATA_ANALYSIS_FROZEN", "ana.ftim", "3", R, 0, kInf, "frozen time"},
    {"DATA_ANALYSIS_TRANSITIONS", "ana.ttim", "7", R, 0, kInf, "transition gap"},
    {"DATA_ANALYSIS_POSTPROCESS", "ana.inte", "0", I, 0, 1, "interpolation"},
    {"DATA_ANALYSIS_POSTPROCESS", "ana.intf", "25", I, 0, kInf, "maximum interpolated gap"},
    {"DATA_ANALYSIS_POSTPROCESS", "ana.smoo", "0", I, 0, 1, "moving average smoothing"},
    {"DATA_ANALYSIS_OTHER", "ana.rvis", "0.05", R, 0, 1, "minimum visibility for normalization"},
    {"MAIN_VIDEO_PARAMETERS", "oth.mini", "0", R, 0, kInf, "start minute"},
    {"MAIN_VIDEO_PARAMETERS", "oth.mend", "1e+10", R, 0, kInf, "end minute"},
    {"MAIN_VIDEO_PARAMETERS", "oth.atyp", "8", I, 0, kInf, "arena type (reserved)"},
    {"MAIN_VIDEO_PARAMETERS", "oth.frat", "25", R, 0, kInf, "frame rate for sources without one"},
    {"MAIN_VIDEO_PARAMETERS", "oth.rees", "1", R, 0, kInf, "image size change (reserved)"},
};

const std::vector<ParamSpec> kColors = {
    {"GENERAL_PARAMETERS", "traj.long", "25", I, 0, kInf, "trajectory length in tracking images"},
    {"GENERAL_PARAMETERS", "roiL.widt", "2", I, 0, 100, "arena rectangle width"},
    {"GENERAL_PARAMETERS", "traL.widt", "1", I, 1, 100, "trajectory width"},
    {"GENERAL_PARAMETERS", "staL.widt", "1", I, 0, 100, "zone line width"},
    {"GENERAL_PARAMETERS", "labl.size", "2", I, 0, 100, "label size"},
    {"GENERAL_PARAMETERS", "font.size", "2", I, 0, 100, "font size"},
    {"COLOR_PARAMETERS", "rea.bgnd", "255 255 255", C, 0, 255, "virtual arena background (BGR)"},
    {"COLOR_PARAMETERS", "staL.colr", "0 0 0", C, 0, 255, "zone lines (BGR)"},
    {"COLOR_PARAMETERS", "roiU.colr", "255 0 0", C, 0, 255, "non-selected arena (BGR)"},
    {"COLOR_PARAMETERS", "roiS.colr", "0 255 0", C, 0, 255, "selected arena (BGR)"},
    {"COLOR_PARAMETERS", "roNU.colr", "255 0 0", C, 0, 255, "non-selected arena name (BGR)"},
    {"COLOR_PARAMETERS", "roNS.colr", "0 255 0", C, 0, 255, "selected arena name (BGR)"},
    {"COLOR_PARAMETERS", "roiM.colr", "0 0 255", C, 0, 255, "tracking areas (BGR)"},
};

// Older files spell the map width code kal.tcnd.
std::string canonical_code(const std::string& code) { return code == "kal.tcnd" ? "kal.tcmd" : code; }

std::string check_value(const ParamSpec& s, const std::string& value) {
  const std::string v = trim(value);
  auto range_error = [&](double x) {
    std::ostringstream os;
    os << s.code << ": value " << format_number(x) << " outside [" << format_number(s.lo) << ", "
       << format_number(s.hi) << "]";
    return os.str();
  };
  switch (s.kind) {
    case ParamKind::Text:
      if (v.empty() || split_ws(v).size() != 1) throw ConfigError(std::string(s.code) + ": expected one word");
      return v;
    case ParamKind::Triple: {
      const auto parts = split_ws(v);
      if (parts.size() != 3) throw ConfigError(std::string(s.code) + ": expected three values");
      std::string out;
      for (const auto& p : parts) {
        const auto n = parse_integer(p);
        if (!n) throw ConfigError(std::string(s.code) + ": non-integer value '" + p + "'");
        if (*n < s.lo || *n > s.hi) throw ConfigError(range_error(static_cast<double>(*n)));
        out += (out.empty() ? "" : " ") + std::to_string(*n);
      }
      return out;
    }
    case ParamKind::Integer: {
      const auto n = parse_number(v);
      if (!n || split_ws(v).size() != 1) throw ConfigError(std::string(s.code) + ": non-numeric value '" + v + "'");
      if (*n != std::floor(*n)) throw ConfigError(std::string(s.code) + ": expected an integer, got '" + v + "'");
      if (*n < s.lo || *n > s.hi) throw ConfigError(range_error(*n));
      if (std::abs(*n) > 9e15) throw ConfigError(range_error(*n));
      return std::to_string(static_cast<long long>(*n));
    }
    case ParamKind::Real: {
      const auto n = parse_number(v);
      if (!n || split_ws(v).size() != 1 || !std::isfinite(*n))
        throw ConfigError(std::string(s.code) + ": non-numeric value '" + v + "'");
      if (*n < s.lo || *n > s.hi) throw ConfigError(range_error(*n));
      return format_number(*n);
    }
  }
  return v;
}

ParamSet parse_with(const std::vector<ParamSpec>* reg, const std::string& text, const std::string& origin) {
  ParamSet ps(reg);
  std::map<std::string, bool> known_sections;
  for (const auto& s : *reg) known_sections[s.section] = true;
  for (const auto& sec : parse_sections(text, origin)) {
    if (!sec.name.empty() && !known_sections.count(sec.name))
      throw ConfigError(origin + ":" + std::to_string(sec.line) + ": unknown section " + sec.name);
    for (const auto& e : sec.entries) {
      try {
        ps.set(e.code, e.value);
      } catch (const ConfigError& err) {
        throw ConfigError(origin + ":" + std::to_string(e.line) + ": " + err.what());
      }
    }
  }
  return ps;
}

}  // namespace

bool is_section_header(const std::string& line) {
  if (line.empty()) return false;
  for (char c : line)
    if (!(std::isupper(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  return std::isupper(static_cast<unsigned char>(line[0])) != 0;
}

std::vector<KeyValueSection> parse_sections(const std::string& text, const std::string& origin) {
  std::vector<KeyValueSection> out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int ln = static_cast<int>(i) + 1;
    std::string line = trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    if (is_section_header(line)) {
      out.push_back({line, ln, {}});
      continue;
    }
    const auto ws = line.find_first_of(" \t");
    if (ws == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(ln) + ": missing value for '" + line + "'");
    if (out.empty()) out.push_back({"", 0, {}});
    out.back().entries.push_back({line.substr(0, ws), trim(line.substr(ws)), ln});
  }
  return out;
}

ParamSet::ParamSet(const std::vector<ParamSpec>* registry) : registry_(registry) {
  for (const auto& s : *registry_) values_[s.code] = check_value(s, s.default_value);
}

const ParamSpec* ParamSet::find(const std::string& code) const {
  const std::string c = canonical_code(code);
  for (const auto& s : *registry_)
    if (c == s.code) return &s;
  return nullptr;
}

void ParamSet::set(const std::string& code, const std::string& value) {
  const ParamSpec* s = find(code);
  if (!s) throw ConfigError("unknown code " + code);
  values_[s->code] = check_value(*s, value);
}

const std::string& ParamSet::raw(const std::string& code) const {
  const ParamSpec* s = find(code);
  if (!s) throw ConfigError("unknown code " + code);
  return values_.at(s->code);
}

double ParamSet::real(const std::string& code) const { return *parse_number(raw(code)); }

int ParamSet::integer(const std::string& code) const {
  const double v = real(code);
  if (v > std::numeric_limits<int>::max()) return std::numeric_limits<int>::max();
  return static_cast<int>(v);
}

std::vector<int> ParamSet::triple(const std::string& code) const {
  std::vector<int> out;
  for (const auto& p : split_ws(raw(code))) out.push_back(static_cast<int>(*parse_integer(p)));
  return out;
}

std::string ParamSet::write() const {
  std::ostringstream os;
  std::string section;
  for (const auto& s : *registry_) {
    if (section != s.section) {
      if (!section.empty()) os << "\n";
      section = s.section;
      os << section << "\n";
    }
    os << s.code << "\t" << values_.at(s.code) << "\n";
  }
  return os.str();
}

const std::vector<ParamSpec>& configuration_registry() { return kConfiguration; }
const std::vector<ParamSpec>& color_registry() { return kColors; }

Config default_config() { return ParamSet(&kConfiguration); }
Config parse_configuration(const std::string& text, const std::string& origin) {
  return parse_with(&kConfiguration, text, origin);
}
Config load_configuration(const std::string& path) { return parse_configuration(read_file(path), path); }
ParamSet default_colors() { return ParamSet(&kColors); }
ParamSet parse_colors(const std::string& text, const std::string& origin) { return parse_with(&kColors, text, origin); }

int threads_param(const Config& c) { return std::max(1, c.integer("exe.thre")); }

ArenaParams arena_params(const Config& c) {
  ArenaParams p;
  p.thre = c.integer("roi.thre");
  p.poly = c.real("roi.poly");
  p.elms = c.integer("roi.elms");
  p.dilt = c.integer("roi.dilt");
  p.erot = c.integer("roi.erot");
  p.mins = static_cast<std::int64_t>(c.real("roi.mins"));
  p.fite = c.integer("roi.fite") != 0;
  p.redr = c.real("roi.redr");
  return p;
}

GmmParams gmm_params(const Config& c) {
  GmmParams p;
  p.enabled = c.integer("bgs.mode") != 0;
  p.history = c.integer("bgs.num");
  p.mahal_thresh = c.real("bgs.thre");
  p.num_gaussians = c.integer("bgs.numg");
  p.background_ratio = c.real("bgs.ratb");
  p.learning_rate = c.real("bgs.lstp");
  return p;
}

DetectionParams detection_params(const Config& c) {
  DetectionParams p;
  p.thre = c.integer("det.thre");
  p.opcl = c.integer("det.opcl");
  p.elms = c.integer("det.elms");
  p.dilt = c.integer("det.dilt");
  p.erot = c.integer("det.erot");
  p.erdi = c.integer("det.erdi");
  p.elss = c.integer("det.elss");
  p.ertt = c.integer("det.ertt");
  p.filt = c.integer("det.filt") != 0;
  p.mins = c.real("det.mins");
  p.maxs = c.real("det.maxs");
  p.minr = c.real("det.minr");
  p.maxr = c.real("det.maxr");
  p.mish = c.real("det.mish");
  p.mash = c.real("det.mash");
  p.minf = c.real("det.minf");
  return p;
}

TrackerParams tracker_params(const Config& c) {
  TrackerParams p;
  p.kalman.time = c.real("kal.time");
  p.kalman.pron = c.real("kal.pron");
  p.kalman.mean = c.real("kal.mean");
  p.kalman.errc = c.real("kal.errc");
  p.disf = c.real("kal.disf");
  p.sich = c.real("kal.sich");
  p.dund = c.integer("kal.dund");
  p.dage = c.integer("kal.dage");
  p.dmax = c.integer("kal.dmax");
  p.ntra = c.integer("kal.ntra");
  p.advr = c.real("kal.advr");
  p.advm = c.real("kal.advm");
  p.cnft = c.integer("kal.cnft");
  p.tfmi = c.integer("kal.tfmi");
  p.tfma = c.integer("kal.tfma");
  p.tdma = c.integer("kal.tdma");
  p.acor = c.real("kal.acor");
  p.bcor = c.real("kal.bcor");
  p.mins = c.integer("kal.mins");
  p.feature_cap = c.integer("kal.hist");
  return p;
}

FeatureParams feature_params(const Config& c) {
  FeatureParams p;
  p.hiss = c.integer("kal.hiss");
  p.tcmr = c.integer("kal.tcmr");
  p.tcmd = c.integer("kal.tcmd");
  p.hist = c.integer("kal.hist");
  return p;
}

IdentityParams identity_params(const Config& c) {
  IdentityParams p;
  p.ntra = c.integer("kal.ntra");
  p.idal = c.integer("kal.idal");
  p.fdis = c.real("kal.fdis");
  p.disf = c.real("kal.disf");
  p.cmsc = c.real("kal.cmsc");
  p.cmhc = c.real("kal.cmhc");
  p.mcmp = c.integer("kal.mcmp");
  p.mavg = c.integer("kal.mAvg") != 0;
  p.gstd = c.real("kal.gStd");
  p.rgrp = c.integer("kal.rGrp");
  p.hord = c.integer("kal.hOrd") != 0;
  p.mins = c.integer("kal.mins");
  p.idgb = c.real("kal.idgb");
  p.idla = c.real("kal.idla");
  p.idlb = c.real("kal.idlb");
  p.idsa = c.real("kal.idsa");
  p.idsb = c.real("kal.idsb");
  p.hist = c.integer("kal.hist");
  return p;
}

AnalyticsParams analytics_params(const Config& c) {
  AnalyticsParams p;
  p.norm = c.integer("ana.norm") != 0;
  p.aror = c.integer("ana.aror");
  p.nzon = c.integer("ana.nzon");
  p.zsiz = c.real("ana.zsizq");
  p.spsa = c.integer("ana.spsa");
  p.mobs = c.real("ana.mobs");
  p.fmmt = c.real("ana.fmmt");
  p.ftim = c.real("ana.ftim");
  p.ttim = c.real("ana.ttim");
  p.inte = c.integer("ana.inte") != 0;
  p.intf = c.integer("ana.intf");
  p.smoo = c.integer("ana.smoo") != 0;
  p.rvis = c.real("ana.rvis");
  return p;
}

RenderParams render_params(const ParamSet& colors) {
  auto rgb = [&](const char* code) {
    auto bgr = colors.triple(code);
    return std::vector<int>{bgr[2], bgr[1], bgr[0]};
  };
  RenderParams p;
  p.traj_long = colors.integer("traj.long");
  p.roi_width = colors.integer("roiL.widt");
  p.trajectory_width = colors.integer("traL.widt");
  p.zone_width = colors.integer("staL.widt");
  p.background_rgb = rgb("rea.bgnd");
  p.zone_rgb = rgb("staL.colr");
  p.area_rgb = rgb("roiM.colr");
  return p;
}

DistortionCoefficients restrict_distortion(const DistortionCoefficients& d, const Config& c) {
  return d.restricted_to(c.integer("cal.dist"));
}

}  // namespace arenatrack

#pragma once

#include <map>
#include <string>
#include <vector>

#include "arenatrack/arena.hpp"
#include "arenatrack/background.hpp"
#include "arenatrack/calibration.hpp"
#include "arenatrack/detection.hpp"
#include "arenatrack/features.hpp"
#include "arenatrack/identity.hpp"
#include "arenatrack/tracker.hpp"

namespace arenatrack {

enum class ParamKind { Integer, Real, Text, Triple };

struct ParamSpec {
  const char* section;
  const char* code;
  const char* default_value;
  ParamKind kind;
  double lo;
  double hi;
  const char* help;
};

// Generic "SECTION_HEADER" + "code value" grammar shared by configuration,
// color and scene files.
struct KeyValueLine {
  std::string code;
  std::string value;  // remainder of the line, trimmed
  int line = 0;
};
struct KeyValueSection {
  std::string name;
  int line = 0;
  std::vector<KeyValueLine> entries;
};
bool is_section_header(const std::string& line);
std::vector<KeyValueSection> parse_sections(const std::string& text, const std::string& origin);

class ParamSet {
 public:
  explicit ParamSet(const std::vector<ParamSpec>* registry);

  const std::vector<ParamSpec>& registry() const { return *registry_; }
  const ParamSpec* find(const std::string& code) const;

  // Validates against the registry; errors name the code.
  void set(const std::string& code, const std::string& value);
  const std::string& raw(const std::string& code) const;
  double real(const std::string& code) const;
  int integer(const std::string& code) const;
  const std::string& text(const std::string& code) const { return raw(code); }
  std::vector<int> triple(const std::string& code) const;

  std::string write() const;
  bool operator==(const ParamSet& o) const { return values_ == o.values_; }

 private:
  const std::vector<ParamSpec>* registry_;
  std::map<std::string, std::string> values_;
};

const std::vector<ParamSpec>& configuration_registry();
const std::vector<ParamSpec>& color_registry();

using Config = ParamSet;
Config default_config();
Config parse_configuration(const std::string& text, const std::string& origin = "configuration");
Config load_configuration(const std::string& path);
ParamSet default_colors();
ParamSet parse_colors(const std::string& text, const std::string& origin = "colors");

struct AnalyticsParams {
  bool norm = false;
  int aror = 3;
  int nzon = 30;
  double zsiz = 50;
  int spsa = 2;
  double mobs = 1;
  double fmmt = 5, ftim = 3;
  double ttim = 7;
  bool inte = false;
  int intf = 25;
  bool smoo = false;
  double rvis = 0.05;
};

struct RenderParams {
  int traj_long = 25;
  int roi_width = 2;
  int trajectory_width = 1;
  int zone_width = 1;
  std::vector<int> background_rgb{255, 255, 255};
  std::vector<int> zone_rgb{0, 0, 0};
  std::vector<int> area_rgb{255, 0, 0};
};

int threads_param(const Config& c);
ArenaParams arena_params(const Config& c);
GmmParams gmm_params(const Config& c);
DetectionParams detection_params(const Config& c);
TrackerParams tracker_params(const Config& c);
FeatureParams feature_params(const Config& c);
IdentityParams identity_params(const Config& c);
AnalyticsParams analytics_params(const Config& c);
RenderParams render_params(const ParamSet& colors);
DistortionCoefficients restrict_distortion(const DistortionCoefficients& d, const Config& c);

}  // namespace arenatrack

#include "fsq/params.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fsq/errors.hpp"

namespace fsq {
namespace {

// Propulsion fit shared by both presets: kf from the hover thrust / prop
// speed pair of the reference airframe, kt from its steady spin rate with
// one opposing pair running, Jp an order-of-magnitude 12-13" prop+rotor value.
constexpr double kPresetKf = 1.091684e-5;
constexpr double kPresetKt = 1.461053e-7;
constexpr double kPresetJp = 0.0;  // propeller axial MOI: not measured for either airframe

double parse_double(const std::string& key, const std::string& text) {
  try {
    size_t pos = 0;
    double v = std::stod(text, &pos);
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) pos++;
    if (pos != text.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for '" + key + "': '" + text + "'");
  }
}

}  // namespace

void QuadParams::validate() const {
  const struct {
    const char* name;
    double v;
  } positive[] = {{"M", M},     {"l", l},   {"g", g},   {"Jxx", Jxx},
                  {"Jyy", Jyy}, {"Jzz", Jzz}, {"kf", kf}, {"kt", kt}};
  for (const auto& f : positive) {
    if (!(f.v > 0.0) || !std::isfinite(f.v))
      throw ConfigError(std::string("QuadParams.") + f.name + " must be strictly positive");
  }
  // Jp and gamma may legitimately be zero (massless rotor / drag-free).
  const struct {
    const char* name;
    double v;
  } nonneg[] = {{"Jp", Jp}, {"gamma", gamma}};
  for (const auto& f : nonneg) {
    if (!(f.v >= 0.0) || !std::isfinite(f.v))
      throw ConfigError(std::string("QuadParams.") + f.name + " must be nonnegative");
  }
  if (!std::isfinite(Jxz)) throw ConfigError("QuadParams.Jxz must be finite");
}

QuadParams preset_params(const std::string& name) {
  QuadParams p;
  p.l = 0.2475;
  p.g = 9.80665;
  p.Jp = kPresetJp;
  p.kf = kPresetKf;
  p.kt = kPresetKt;
  if (name == "low_inertia") {
    p.M = 1.439;
    p.Jxx = 0.018517242;
    p.Jyy = 0.020562251;
    p.Jzz = 0.028316170;
    p.Jxz = 9.76065e-05;
    p.gamma = 0.000184199;
  } else if (name == "high_inertia") {
    p.M = 1.988;
    p.Jxx = 0.125203794;
    p.Jyy = 0.120414017;
    p.Jzz = 0.163195234;
    p.Jxz = 2.66838e-04;
    p.gamma = 0.00258396780706647;
  } else {
    throw ConfigError("unknown parameter preset '" + name + "'");
  }
  return p;
}

bool is_param_preset(const std::string& name) {
  return name == "low_inertia" || name == "high_inertia";
}

namespace {

std::map<std::string, double QuadParams::*> field_map() {
  return {{"M", &QuadParams::M},     {"l", &QuadParams::l},
          {"g", &QuadParams::g},     {"Jxx", &QuadParams::Jxx},
          {"Jyy", &QuadParams::Jyy}, {"Jzz", &QuadParams::Jzz},
          {"Jxz", &QuadParams::Jxz}, {"Jp", &QuadParams::Jp},
          {"gamma", &QuadParams::gamma}, {"kf", &QuadParams::kf},
          {"kt", &QuadParams::kt}};
}

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

QuadParams load_params(std::istream& in) {
  auto fields = field_map();
  // Files are fragments: unspecified fields keep the low-inertia defaults,
  // or the base named by an (optional, leading) preset= line.
  QuadParams p = preset_params("low_inertia");
  std::map<std::string, bool> seen;
  std::string line;
  int lineno = 0;
  bool any = false;
  while (std::getline(in, line)) {
    lineno++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("parameter file line " + std::to_string(lineno) + ": expected key=value");
    std::string key = strip(line.substr(0, eq));
    std::string val = strip(line.substr(eq + 1));
    if (key == "preset") {
      if (any)
        throw ConfigError("parameter file line " + std::to_string(lineno) +
                          ": preset= must come before overrides");
      p = preset_params(val);
      any = true;
      continue;
    }
    auto it = fields.find(key);
    if (it == fields.end())
      throw ConfigError("parameter file line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (seen[key])
      throw ConfigError("parameter file line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    seen[key] = true;
    any = true;
    p.*(it->second) = parse_double(key, val);
  }
  p.validate();
  return p;
}

QuadParams load_params_file(const std::string& path) {
  if (is_param_preset(path)) return preset_params(path);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open parameter file '" + path + "'");
  return load_params(in);
}

std::string format_params(const QuadParams& p) {
  char buf[64];
  std::ostringstream out;
  auto emit = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%s = %.12g\n", key, v);
    out << buf;
  };
  emit("M", p.M);
  emit("l", p.l);
  emit("g", p.g);
  emit("Jxx", p.Jxx);
  emit("Jyy", p.Jyy);
  emit("Jzz", p.Jzz);
  emit("Jxz", p.Jxz);
  emit("Jp", p.Jp);
  emit("gamma", p.gamma);
  emit("kf", p.kf);
  emit("kt", p.kt);
  return out.str();
}

void apply_param_override(QuadParams& p, const std::string& key, const std::string& value) {
  auto fields = field_map();
  auto it = fields.find(key);
  if (it == fields.end()) throw ConfigError("unknown parameter key '" + key + "'");
  p.*(it->second) = parse_double(key, value);
}

}  // namespace fsq

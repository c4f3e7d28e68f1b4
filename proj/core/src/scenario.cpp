#include "fsq/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fsq/errors.hpp"

namespace fsq {

Eigen::Vector3d ref_at(const std::vector<ReferenceRow>& refs, double t) {
  if (refs.empty()) return {0, 0, 0};
  const ReferenceRow* active = &refs.front();
  for (const ReferenceRow& r : refs) {
    if (r.t <= t + 1e-12) active = &r;
    else break;
  }
  return {active->x, active->y, active->z};
}

void apply_default_gains(ControllerConfig& ctrl, const FailureConfig& failure) {
  ctrl.weights = LqrWeights{};
  ctrl.outer = OuterConfig{};
  ctrl.outer.wn_x = ctrl.outer.wn_y = 1.0;
  ctrl.outer.zeta_x = ctrl.outer.zeta_y = 0.7;
  if (failure.is_single()) {
    // Default three-propeller tuning; the per-motor input weights and trim
    // integrators are tied to the motor's role relative to the failed one
    // (next/opposite/previous in the cyclic layout), so the same numbers
    // rotate with the failure.
    const int j = failure.failed[0];
    const int nxt = j % 4 + 1;
    const int opp = (j + 1) % 4 + 1;
    const int prv = (j + 2) % 4 + 1;
    ctrl.weights.Q_p = ctrl.weights.Q_q = 1.0;
    ctrl.weights.Q_nx = ctrl.weights.Q_ny = 20.0;
    ctrl.weights.R_f = {1.0, 1.0, 1.0, 1.0};
    ctrl.weights.R_f[nxt - 1] = 1.11;
    ctrl.weights.R_f[opp - 1] = 10.0;
    ctrl.weights.R_f[prv - 1] = 1.0;
    ctrl.outer.wn_z = 2.1;
    ctrl.outer.zeta_z = 4.5;
    ctrl.outer.cap_xy = 2.1;
    ctrl.outer.cap_z = 16.5;
    // Thrust-share trim: unity feedthrough of the demanded per-motor share,
    // integral action soaks up model error.
    auto trim = [](double ki) {
      PidGains g;
      g.kp = 1.0;
      g.ki = ki;
      g.out_min = -6.0;
      g.out_max = 6.0;
      return g;
    };
    for (auto& g : ctrl.force_pids) g = PidGains{};
    ctrl.force_pids[nxt - 1] = trim(0.129);
    ctrl.force_pids[opp - 1] = trim(0.05);
    ctrl.force_pids[prv - 1] = trim(0.114);
    ctrl.altitude_pid = PidGains{};
  } else {
    ctrl.weights.Q_p = ctrl.weights.Q_q = 0.0;
    ctrl.weights.Q_nx = ctrl.weights.Q_ny = 5362.0;
    ctrl.weights.R_f = {1.0, 1.0, 1.0, 1.0};
    ctrl.outer.cap_xy = 5.4;
    ctrl.outer.cap_z = 1e30;  // vertical runs through the thrust PID instead
    ctrl.outer.wn_z = 0;
    ctrl.outer.zeta_z = 0;
    ctrl.altitude_pid = PidGains{};
    ctrl.altitude_pid.kp = 4.3;
    ctrl.altitude_pid.kd = 8.9;
    ctrl.altitude_pid.ki = 0.0;
    ctrl.altitude_pid.out_min = -1.1;
    ctrl.altitude_pid.out_max = 1.1;
    for (auto& g : ctrl.force_pids) g = PidGains{};
  }
}

namespace {

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& text) {
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

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for '" + key + "': '" + text + "'");
  }
}

// "4" or "2,4" -> failed-motor list.
std::vector<int> parse_motor_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = strip(tok);
    if (tok.empty()) throw ConfigError("empty motor id in '" + text + "'");
    if (tok.size() != 1 || tok[0] < '1' || tok[0] > '4')
      throw ConfigError("bad motor id '" + tok + "' (want 1..4)");
    out.push_back(tok[0] - '0');
  }
  if (out.empty()) throw ConfigError("empty motor list");
  return out;
}

bool controller_kv(ControllerConfig& c, const std::string& key, const std::string& val) {
  auto d = [&] { return to_double(key, val); };
  if (key == "Q_p") c.weights.Q_p = d();
  else if (key == "Q_q") c.weights.Q_q = d();
  else if (key == "Q_nx") c.weights.Q_nx = d();
  else if (key == "Q_ny") c.weights.Q_ny = d();
  else if (key == "Q_n") c.weights.Q_nx = c.weights.Q_ny = d();
  else if (key == "R") c.weights.R_f = {d(), d(), d(), d()};
  else if (key == "R_f1") c.weights.R_f[0] = d();
  else if (key == "R_f2") c.weights.R_f[1] = d();
  else if (key == "R_f3") c.weights.R_f[2] = d();
  else if (key == "R_f4") c.weights.R_f[3] = d();
  else if (key == "kp_z") c.altitude_pid.kp = d();
  else if (key == "kd_z") c.altitude_pid.kd = d();
  else if (key == "ki_z") c.altitude_pid.ki = d();
  else if (key == "uz_min") c.altitude_pid.out_min = d();
  else if (key == "uz_max") c.altitude_pid.out_max = d();
  else if (key == "ki_f1") c.force_pids[0].ki = d();
  else if (key == "ki_f2") c.force_pids[1].ki = d();
  else if (key == "ki_f3") c.force_pids[2].ki = d();
  else if (key == "ki_f4") c.force_pids[3].ki = d();
  else if (key == "kp_f") for (auto& g : c.force_pids) g.kp = d();
  else if (key == "wn_xy") { c.outer.wn_x = c.outer.wn_y = d(); }
  else if (key == "zeta_xy") { c.outer.zeta_x = c.outer.zeta_y = d(); }
  else if (key == "wn_z") c.outer.wn_z = d();
  else if (key == "zeta_z") c.outer.zeta_z = d();
  else if (key == "cap_xy") c.outer.cap_xy = d();
  else if (key == "cap_z") c.outer.cap_z = d();
  else if (key == "f_max") c.f_max = d();
  else if (key == "f_inner") c.f_inner = d();
  else if (key == "f_outer") c.f_outer = d();
  else return false;
  return true;
}

bool initial_kv(InitialSpec& s, const std::string& key, const std::string& val) {
  auto d = [&] { return to_double(key, val); };
  if (key == "x") s.x = d();
  else if (key == "y") s.y = d();
  else if (key == "z") s.z = d();
  else if (key == "xd") s.xd = d();
  else if (key == "yd") s.yd = d();
  else if (key == "zd") s.zd = d();
  else if (key == "phi") s.phi = d();
  else if (key == "theta") s.theta = d();
  else if (key == "psi") s.psi = d();
  else if (key == "p") s.p = d();
  else if (key == "q") s.q = d();
  else if (key == "r") s.r = d();
  else return false;
  return true;
}

bool sensors_kv(ScenarioSpec& s, const std::string& key, const std::string& val) {
  auto d = [&] { return to_double(key, val); };
  if (key == "noise") {
    if (val == "ideal") s.noise = NoiseConfig::ideal();
    else if (val == "default") s.noise = NoiseConfig{};
    else throw ConfigError("noise must be 'ideal' or 'default', got '" + val + "'");
  } else if (key == "seed") s.seed = to_u64(key, val);
  else if (key == "sigma_gyro") s.noise.sigma_gyro = d();
  else if (key == "sigma_att") s.noise.sigma_att = d();
  else if (key == "sigma_gps_pos") s.noise.sigma_gps_pos = d();
  else if (key == "sigma_gps_vel") s.noise.sigma_gps_vel = d();
  else if (key == "sigma_ultra") s.noise.sigma_ultra = d();
  else if (key == "gps_hz") s.rates.gps_hz = d();
  else if (key == "ultra_hz") s.rates.ultra_hz = d();
  else if (key == "tau_complementary") s.filters.tau_complementary = d();
  else if (key == "alpha_ema") s.filters.alpha_ema = d();
  else if (key == "alpha_zd") s.filters.alpha_zd = d();
  else return false;
  return true;
}

bool detector_kv(DetectorConfig& c, const std::string& key, const std::string& val) {
  auto d = [&] { return to_double(key, val); };
  if (key == "window") c.window = d();
  else if (key == "thr_rate_pq") c.thr_rate_pq = d();
  else if (key == "thr_rate_r") c.thr_rate_r = d();
  else if (key == "thr_angle") c.thr_angle = d();
  else if (key == "dwell") c.dwell = d();
  else return false;
  return true;
}

}  // namespace

ScenarioSpec load_scenario(std::istream& in) {
  ScenarioSpec s;
  bool gains_given = false;
  bool model_given = false;
  std::string section;
  std::string line;
  int lineno = 0;

  // Two passes are overkill; instead gather raw lines per section, then apply
  // defaults that depend on [failure] before replaying [controller].
  struct Item {
    std::string section, key, val;
    int lineno;
  };
  std::vector<Item> items;
  std::vector<std::pair<int, std::string>> ref_lines;

  while (std::getline(in, line)) {
    lineno++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = line.substr(1, line.size() - 2);
      const char* known[] = {"plant", "model", "failure",  "references",
                             "controller", "detector", "sensors", "initial", "run"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": content before any [section]");
    if (section == "references") {
      ref_lines.emplace_back(lineno, line);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    items.push_back({section, strip(line.substr(0, eq)), strip(line.substr(eq + 1)), lineno});
  }

  // failure first: controller defaults depend on it
  for (const Item& it : items) {
    if (it.section != "failure") continue;
    if (it.key == "motors") s.failure.failed = parse_motor_list(it.val);
    else if (it.key == "rho") s.failure.rho = to_double(it.key, it.val);
    else if (it.key == "time") s.failure_time = to_double(it.key, it.val);
    else throw ConfigError("line " + std::to_string(it.lineno) + ": unknown failure key '" + it.key + "'");
  }
  if (s.failure.failed.empty())
    throw ConfigError("scenario needs a [failure] section with a motors list");
  // any distinct set may be injected; only flyable shapes get a fail-safe law
  s.failure.validate_set();
  apply_default_gains(s.ctrl, s.failure);

  for (const Item& it : items) {
    const std::string& k = it.key;
    const std::string& v = it.val;
    auto bad_key = [&]() {
      throw ConfigError("line " + std::to_string(it.lineno) + ": unknown " + it.section +
                        " key '" + k + "'");
    };
    if (it.section == "plant" || it.section == "model") {
      QuadParams& p = it.section == "plant" ? s.plant : s.model;
      if (it.section == "model") model_given = true;
      if (k == "preset") p = preset_params(v);
      else apply_param_override(p, k, v);
    } else if (it.section == "failure") {
      // handled above
    } else if (it.section == "controller") {
      gains_given = true;
      if (!controller_kv(s.ctrl, k, v)) bad_key();
    } else if (it.section == "detector") {
      if (!detector_kv(s.detector, k, v)) bad_key();
    } else if (it.section == "sensors") {
      if (!sensors_kv(s, k, v)) bad_key();
    } else if (it.section == "initial") {
      if (!initial_kv(s.initial, k, v)) bad_key();
    } else if (it.section == "run") {
      if (k == "duration") s.duration = to_double(k, v);
      else if (k == "eq_source") {
        if (v == "plant") s.eq_from_plant = true;
        else if (v == "model") s.eq_from_plant = false;
        else throw ConfigError("eq_source must be 'plant' or 'model'");
      } else bad_key();
    }
  }
  (void)gains_given;
  if (!model_given) s.model = s.plant;

  for (const auto& [ln, text] : ref_lines) {
    std::istringstream ss(text);
    ReferenceRow r{};
    if (!(ss >> r.t >> r.x >> r.y >> r.z))
      throw ConfigError("line " + std::to_string(ln) + ": reference row wants 't x y z'");
    std::string extra;
    if (ss >> extra) throw ConfigError("line " + std::to_string(ln) + ": trailing junk in reference row");
    s.refs.push_back(r);
  }
  std::sort(s.refs.begin(), s.refs.end(),
            [](const ReferenceRow& a, const ReferenceRow& b) { return a.t < b.t; });

  s.plant.validate();
  s.model.validate();
  if (s.duration <= 0) throw ConfigError("run duration must be positive");
  if (s.ctrl.f_inner <= 0 || s.ctrl.f_outer <= 0 || s.ctrl.f_outer > s.ctrl.f_inner)
    throw ConfigError("need 0 < f_outer <= f_inner");
  s.rates.imu_hz = s.ctrl.f_inner;
  return s;
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  return load_scenario(in);
}

void apply_gains(ControllerConfig& ctrl, std::istream& in) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line != "[controller]")
        throw ConfigError("gains file line " + std::to_string(lineno) +
                          ": only a [controller] section is allowed");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("gains file line " + std::to_string(lineno) + ": expected key = value");
    const std::string k = strip(line.substr(0, eq));
    const std::string v = strip(line.substr(eq + 1));
    if (!controller_kv(ctrl, k, v))
      throw ConfigError("gains file line " + std::to_string(lineno) + ": unknown key '" + k + "'");
  }
}

void apply_gains_file(ControllerConfig& ctrl, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open gains file '" + path + "'");
  apply_gains(ctrl, in);
}

std::string format_scenario(const ScenarioSpec& s) {
  std::ostringstream out;
  char buf[128];
  auto kv = [&](const char* k, double v) {
    std::snprintf(buf, sizeof(buf), "%s = %.12g\n", k, v);
    out << buf;
  };
  out << "[plant]\n" << format_params(s.plant) << "\n[model]\n" << format_params(s.model);
  out << "\n[failure]\nmotors = ";
  for (size_t i = 0; i < s.failure.failed.size(); ++i)
    out << (i ? "," : "") << s.failure.failed[i];
  out << "\n";
  kv("rho", s.failure.rho);
  kv("time", s.failure_time);
  out << "\n[controller]\n";
  kv("Q_p", s.ctrl.weights.Q_p);
  kv("Q_q", s.ctrl.weights.Q_q);
  kv("Q_nx", s.ctrl.weights.Q_nx);
  kv("Q_ny", s.ctrl.weights.Q_ny);
  kv("R_f1", s.ctrl.weights.R_f[0]);
  kv("R_f2", s.ctrl.weights.R_f[1]);
  kv("R_f3", s.ctrl.weights.R_f[2]);
  kv("R_f4", s.ctrl.weights.R_f[3]);
  kv("kp_z", s.ctrl.altitude_pid.kp);
  kv("kd_z", s.ctrl.altitude_pid.kd);
  kv("ki_z", s.ctrl.altitude_pid.ki);
  kv("uz_min", s.ctrl.altitude_pid.out_min);
  kv("uz_max", s.ctrl.altitude_pid.out_max);
  kv("ki_f1", s.ctrl.force_pids[0].ki);
  kv("ki_f2", s.ctrl.force_pids[1].ki);
  kv("ki_f3", s.ctrl.force_pids[2].ki);
  kv("ki_f4", s.ctrl.force_pids[3].ki);
  kv("wn_xy", s.ctrl.outer.wn_x);
  kv("zeta_xy", s.ctrl.outer.zeta_x);
  kv("wn_z", s.ctrl.outer.wn_z);
  kv("zeta_z", s.ctrl.outer.zeta_z);
  kv("cap_xy", s.ctrl.outer.cap_xy);
  kv("cap_z", s.ctrl.outer.cap_z);
  kv("f_max", s.ctrl.f_max);
  kv("f_inner", s.ctrl.f_inner);
  kv("f_outer", s.ctrl.f_outer);
  out << "\n[run]\n";
  kv("duration", s.duration);
  out << "eq_source = " << (s.eq_from_plant ? "plant" : "model") << "\n";
  return out.str();
}

}  // namespace fsq

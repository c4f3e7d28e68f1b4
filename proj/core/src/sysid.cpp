#include "fsq/sysid.hpp"

#include <cmath>
#include <istream>
#include <sstream>

#include "fsq/errors.hpp"

namespace fsq {

PendulumMoi moi_from_pendulum(double M, const PendulumTrial& trial, double g) {
  const double r = trial.pivot_distance, T = trial.period;
  if (M <= 0 || r <= 0 || T <= 0 || g <= 0)
    throw DomainError("moi_from_pendulum: nonpositive input");
  PendulumMoi out;
  out.J_pivot = M * g * r * (T / (2.0 * M_PI)) * (T / (2.0 * M_PI));
  out.J_com = out.J_pivot - M * r * r;
  if (out.J_com <= 0)
    throw DomainError("moi_from_pendulum: period too short for this geometry");
  return out;
}

double prop_moi(double motor_mass, double motor_radius, double blade_mass,
                double blade_radius) {
  if (motor_mass < 0 || motor_radius < 0 || blade_mass < 0 || blade_radius < 0)
    throw DomainError("prop_moi: negative input");
  return 0.5 * motor_mass * motor_radius * motor_radius +
         0.5 * blade_mass * blade_radius * blade_radius;
}

ThrustFit fit_thrust_curve(const std::vector<PropSample>& samples, double Rw) {
  if (samples.size() < 3) throw DomainError("fit_thrust_curve: need at least 3 samples");
  double sw4 = 0, swf = 0, swt = 0;
  for (const PropSample& s : samples) {
    if (s.omega <= 0) throw DomainError("fit_thrust_curve: nonpositive rotor speed");
    const double w2 = s.omega * s.omega;
    const double tau = (s.voltage * s.current - s.current * s.current * Rw) / s.omega;
    sw4 += w2 * w2;
    swf += w2 * s.thrust;
    swt += w2 * tau;
  }
  if (sw4 <= 0) throw DomainError("fit_thrust_curve: degenerate regressor");
  ThrustFit fit;
  fit.kf = swf / sw4;
  fit.kt = swt / sw4;
  if (fit.kf <= 0 || fit.kt <= 0)
    throw ConvergenceError("fit_thrust_curve: fitted coefficient not positive");
  fit.k = fit.kf / fit.kt;
  return fit;
}

double fit_drag(const std::vector<DragSample>& samples) {
  if (samples.size() < 3) throw DomainError("fit_drag: need at least 3 samples");
  double sxx = 0, sxy = 0;
  double wmin = samples.front().omega_ss, wmax = wmin;
  for (const DragSample& s : samples) {
    if (s.total_torque <= 0 || s.omega_ss <= 0)
      throw DomainError("fit_drag: nonpositive sample");
    wmin = std::min(wmin, s.omega_ss);
    wmax = std::max(wmax, s.omega_ss);
    const double x = s.omega_ss * s.omega_ss;
    sxx += x * x;
    sxy += x * s.total_torque;
  }
  if (wmax - wmin <= 1e-12 * wmax)
    throw DomainError("fit_drag: all samples at the same rate");
  return sxy / sxx;
}

namespace {
std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}
}  // namespace

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return (int)i;
  return -1;
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv: empty input");
  t.header = split_commas(line);
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_commas(line);
    if (cells.size() != t.header.size())
      throw ConfigError("csv: line " + std::to_string(lineno) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(t.header.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      size_t used = 0;
      double v = 0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        throw ConfigError("csv: line " + std::to_string(lineno) + ": bad number '" + c + "'");
      }
      while (used < c.size() && std::isspace((unsigned char)c[used])) ++used;
      if (used != c.size())
        throw ConfigError("csv: line " + std::to_string(lineno) + ": bad number '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<PropSample> prop_samples_from_csv(const CsvTable& t) {
  const int iw = t.column("omega"), it = t.column("thrust");
  const int iv = t.column("voltage"), ii = t.column("current");
  if (iw < 0 || it < 0 || iv < 0 || ii < 0)
    throw ConfigError("thrust csv: need columns omega,thrust,voltage,current");
  std::vector<PropSample> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) out.push_back({r[iw], r[it], r[iv], r[ii]});
  return out;
}

std::vector<DragSample> drag_samples_from_csv(const CsvTable& t) {
  const int it = t.column("torque"), iw = t.column("omega_ss");
  if (it < 0 || iw < 0) throw ConfigError("drag csv: need columns torque,omega_ss");
  std::vector<DragSample> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) out.push_back({r[it], r[iw]});
  return out;
}

}  // namespace fsq

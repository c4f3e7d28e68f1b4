#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fsq {

// Compound-pendulum swing test: the body swings about a pivot at distance
// pivot_distance from the center of mass with the given period.
struct PendulumTrial {
  double pivot_distance;  // COM-to-pivot [m]
  double period;          // [s]
  std::string axis;       // label only ("xx", "yy", "zz")
};

struct PendulumMoi {
  double J_pivot;  // inertia about the pivot axis [kg m^2]
  double J_com;    // parallel-axis corrected, about the COM [kg m^2]
};

// J_pivot = M*g*r*(T/2pi)^2, J_com = J_pivot - M*r^2. Throws DomainError
// when J_com comes out nonpositive (period too short for the geometry).
PendulumMoi moi_from_pendulum(double M, const PendulumTrial& trial, double g = 9.80665);

// Spinning hardware modeled as a solid cylinder (motor bell) plus a flat
// disk (blade span), both about the spin axis: 1/2*m*r^2 each.
double prop_moi(double motor_mass, double motor_radius, double blade_mass,
                double blade_radius);

// One row of a static thrust-stand run.
struct PropSample {
  double omega;    // rotor speed [rad/s]
  double thrust;   // measured lift [N]
  double voltage;  // supply voltage [V]
  double current;  // supply current [A]
};

struct ThrustFit {
  double kf;  // thrust = kf * omega^2
  double kt;  // drive torque = kt * omega^2, from electrical power
  double k;   // thrust-to-torque ratio kf/kt
};

// Least squares through the origin on f = kf*w^2. The drive torque for the
// kt fit is air-gap power over speed, tau_e = (V*I - I^2*Rw)/omega, with
// winding resistance Rw. Needs >= 3 samples; throws on a negative fit.
ThrustFit fit_thrust_curve(const std::vector<PropSample>& samples, double Rw = 0.12);

// Steady spin point: applied total torque vs. the settled rate.
struct DragSample {
  double total_torque;  // [N m]
  double omega_ss;      // [rad/s]
};

// Fits gamma in tau = gamma*omega_ss^2 by least squares through the origin.
// Needs >= 3 samples with at least two distinct rates.
double fit_drag(const std::vector<DragSample>& samples);

// Minimal numeric CSV: first line is the header, every other line must parse
// as doubles. Throws ConfigError on ragged or non-numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(std::istream& in);
std::vector<PropSample> prop_samples_from_csv(const CsvTable& t);
std::vector<DragSample> drag_samples_from_csv(const CsvTable& t);

}  // namespace fsq

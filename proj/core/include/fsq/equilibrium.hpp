#pragma once

#include <array>
#include <vector>

#include "fsq/params.hpp"
#include "fsq/state.hpp"

namespace fsq {

// Which motors are out, plus the surviving-opposite thrust ratio rho used by
// single-failure (three-propeller) flight. rho = f_opposite / f_pair, in
// [0, 1]; rho = 0 degenerates to flying on the opposing pair alone. Ignored
// (forced 0) for double failures.
struct FailureConfig {
  std::vector<int> failed;  // 1-based motor indices; flyable sets are {m} or an opposing pair
  double rho = 0.5;

  bool is_single() const { return failed.size() == 1; }
  // Injection-legal: any non-empty set of distinct motors 1..4, rho in [0,1].
  // The simulator cuts these; the detector classifies them. Throws ConfigError.
  void validate_set() const;
  // Flyable: validate_set() plus shape {m} or {1,3}/{2,4} — what a trim and a
  // fail-safe law exist for. Throws ConfigError.
  void validate() const;
  std::array<bool, 4> mask() const;
};

// Spin equilibrium for flight with three or two propellers: body rates,
// per-motor thrusts and speeds, the primary (spin) axis in body coordinates,
// total thrust, and the predicted center-of-mass orbit radius.
struct Equilibrium {
  std::array<double, 4> fbar{0, 0, 0, 0};  // equilibrium thrusts        [N]
  std::array<double, 4> wbar{0, 0, 0, 0};  // equilibrium prop speeds    [rad/s]
  double pbar = 0, qbar = 0, rbar = 0;     // equilibrium body rates     [rad/s]
  std::array<double, 3> n{0, 0, 1};        // primary axis, body frame, unit
  double Fbar = 0;                         // total thrust               [N]
  double epsilon = 0;                      // kt/kf                      [m]
  double Rps = 0;                          // steady orbit radius        [m]
};

// n = (p,q,r)/||(p,q,r)||. Throws DomainError on the zero vector.
std::array<double, 3> primary_axis(double p, double q, double r);

// Steady orbit radius sqrt(1-nz^2)/nz * g/||w||^2 for spin axis component nz
// and rate magnitude omega_norm. Requires 0 < nz <= 1 and omega_norm > 0.
double orbit_radius(double nz, double omega_norm, double g);

// Solves the rotating-frame torque balance + average lift balance.
//  - opposing pair ({1,3} or {2,4}): closed form, f = Mg/2 each, n = (0,0,+-1).
//  - single failure: damped Newton on (f_pair, lead rate, r), seeded from the
//    two-propeller closed form; torque balance of the full rotational
//    dynamics at the returned point is below 1e-10 rad/s^2.
// Motors {1} or {3} out leave net reaction torque about -z, so rbar < 0 and
// the axis points down (nz < 0); the lift balance uses |nz|.
// Throws ConvergenceError if Newton stalls, ConfigError via cfg.validate().
Equilibrium solve_equilibrium(const QuadParams& p, const FailureConfig& cfg);

// Residual of the body-rate dynamics at the equilibrium (should be ~0):
// rotational_accel evaluated at (pbar,qbar,rbar) with the equilibrium thrusts.
std::array<double, 3> equilibrium_residual(const QuadParams& p, const FailureConfig& cfg,
                                           const Equilibrium& eq);

}  // namespace fsq

#pragma once

#include <array>
#include <cstdint>

namespace fsq {

// Rigid-body state, inertial position/velocity + ZYX Euler attitude + body rates.
struct RigidState {
  double x = 0, y = 0, z = 0;        // inertial position            [m]
  double xd = 0, yd = 0, zd = 0;     // inertial velocity            [m/s]
  double phi = 0, theta = 0, psi = 0;  // roll, pitch, yaw           [rad]
  double p = 0, q = 0, r = 0;        // body angular velocity        [rad/s]

  std::array<double, 12> to_array() const {
    return {x, y, z, xd, yd, zd, phi, theta, psi, p, q, r};
  }
  static RigidState from_array(const std::array<double, 12>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9], a[10], a[11]};
  }
};

// Per-motor thrusts plus which motors are failed (failed motors produce zero
// thrust and zero reaction torque no matter what f holds).
struct MotorSet {
  std::array<double, 4> f{0, 0, 0, 0};  // thrust per motor [N], index 0 = motor 1
  std::array<bool, 4> failed{false, false, false, false};

  double thrust(int motor_1based) const {
    return failed[motor_1based - 1] ? 0.0 : f[motor_1based - 1];
  }
};

// Net body wrench produced by the motor set.
struct BodyWrench {
  double F = 0;         // total thrust along body z            [N]
  double tau_phi = 0;   // roll torque                          [N m]
  double tau_theta = 0; // pitch torque                         [N m]
  double tau_psi = 0;   // yaw reaction torque                  [N m]
  double Omega = 0;     // signed prop speed sum, sum (-1)^i w_i [rad/s]
};

}  // namespace fsq

#pragma once

#include <Eigen/Dense>

#include "fsq/params.hpp"
#include "fsq/state.hpp"

namespace fsq {

// Motor layout (top view, x forward, y left, z up):
//
//          1 (x+)
//            |
//   2 (y+) --+-- 4 (y-)
//            |
//          3 (x-)
//
// Motors 1,3 spin opposite to 2,4; their reaction torque is +z.
//
//   F         = f1 + f2 + f3 + f4
//   tau_phi   = l * (f2 - f4)
//   tau_theta = l * (f3 - f1)
//   tau_psi   = (kt/kf) * (f1 - f2 + f3 - f4)
//   Omega     = -w1 + w2 - w3 + w4,  w_i = sqrt(f_i / kf)
//
// Failed motors contribute nothing. Throws DomainError for negative thrust
// on a live motor.
BodyWrench mix_forces(const QuadParams& p, const MotorSet& m);

// Inertial acceleration of the center of mass:
//   xdd = (c_phi s_theta c_psi + s_phi s_psi) * F/M
//   ydd = (c_phi s_theta s_psi - s_phi c_psi) * F/M
//   zdd = (c_phi c_theta) * F/M - g
Eigen::Vector3d translational_accel(const QuadParams& p, double phi, double theta,
                                    double psi, double F);

// Body angular acceleration, diagonal-inertia Euler equations with the
// gyroscopic propeller terms and quadratic yaw drag (gamma * r * |r|):
//   pd = tau_phi/Jxx   - (Jzz-Jyy)/Jxx * q*r - (Jp/Jxx) * q * Omega
//   qd = tau_theta/Jyy - (Jxx-Jzz)/Jyy * p*r - (Jp/Jyy) * p * Omega
//   rd = tau_psi/Jzz   - (Jyy-Jxx)/Jzz * p*q - gamma * r * |r| / Jzz
Eigen::Vector3d rotational_accel(const QuadParams& p, double pr, double qr, double rr,
                                 const BodyWrench& w);

// One fixed-step RK4 step of the full 12-state rigid body under constant
// motor thrusts (zero-order hold). dt must be positive; the default control
// period is 1/450 s. Throws SingularityError when pitch comes within dt of
// +-pi/2 (Euler-rate blow-up).
RigidState step(const QuadParams& p, const RigidState& s, const MotorSet& m, double dt);

// Same vehicle, attitude carried as a rotation matrix so large tumbles have
// no coordinate singularity. Used by the closed-loop simulator; `step`
// above stays the Euler-state view of the identical dynamics.
struct DcmState {
  Eigen::Vector3d pos{0, 0, 0};
  Eigen::Vector3d vel{0, 0, 0};
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();  // body -> inertial
  Eigen::Vector3d omega{0, 0, 0};                   // body rates p,q,r

  RigidState to_rigid() const;
  static DcmState from_rigid(const RigidState& s);
};

DcmState step_dcm(const QuadParams& p, const DcmState& s, const MotorSet& m, double dt);

}  // namespace fsq

#pragma once

#include <Eigen/Dense>

namespace fsq {

// ZYX (yaw-pitch-roll) convention throughout: R_body_to_inertial = Rz(psi)*Ry(theta)*Rx(phi).
Eigen::Matrix3d rot_body_to_inertial(double phi, double theta, double psi);
inline Eigen::Matrix3d rot_inertial_to_body(double phi, double theta, double psi) {
  return rot_body_to_inertial(phi, theta, psi).transpose();
}

struct EulerAngles {
  double phi, theta, psi;
};

// Principal-branch extraction (theta in [-pi/2, pi/2]).
EulerAngles euler_from_rotation(const Eigen::Matrix3d& R_body_to_inertial);

// Body rates -> Euler-angle rates. Throws SingularityError as |theta| -> pi/2
// (the map has 1/cos(theta) in it).
Eigen::Vector3d body_to_euler_rates(double phi, double theta, double p, double q, double r);

// Re-orthonormalize a drifting rotation matrix (Gram-Schmidt on the columns).
Eigen::Matrix3d orthonormalized(const Eigen::Matrix3d& R);

}  // namespace fsq

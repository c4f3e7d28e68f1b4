#include "fsq/frames.hpp"

#include <cmath>

#include "fsq/errors.hpp"

namespace fsq {

Eigen::Matrix3d rot_body_to_inertial(double phi, double theta, double psi) {
  const double cf = std::cos(phi), sf = std::sin(phi);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(psi), sp = std::sin(psi);
  Eigen::Matrix3d R;
  R << cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf,
       sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf,
       -st,     ct * sf,               ct * cf;
  return R;
}

EulerAngles euler_from_rotation(const Eigen::Matrix3d& R) {
  double st = -R(2, 0);
  st = std::max(-1.0, std::min(1.0, st));
  EulerAngles e{};
  e.theta = std::asin(st);
  e.phi = std::atan2(R(2, 1), R(2, 2));
  e.psi = std::atan2(R(1, 0), R(0, 0));
  return e;
}

Eigen::Vector3d body_to_euler_rates(double phi, double theta, double p, double q, double r) {
  const double ct = std::cos(theta);
  if (std::abs(ct) < 1e-9) throw SingularityError("euler rate map singular at theta = +-pi/2");
  const double sf = std::sin(phi), cf = std::cos(phi);
  const double tt = std::tan(theta);
  return {p + q * sf * tt + r * cf * tt,
          q * cf - r * sf,
          (q * sf + r * cf) / ct};
}

Eigen::Matrix3d orthonormalized(const Eigen::Matrix3d& R) {
  Eigen::Vector3d c0 = R.col(0).normalized();
  Eigen::Vector3d c1 = (R.col(1) - c0 * c0.dot(R.col(1))).normalized();
  Eigen::Vector3d c2 = c0.cross(c1);
  Eigen::Matrix3d out;
  out.col(0) = c0;
  out.col(1) = c1;
  out.col(2) = c2;
  return out;
}

}  // namespace fsq

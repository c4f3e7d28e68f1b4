#include "fsq/dynamics.hpp"

#include <cmath>

#include "fsq/errors.hpp"
#include "fsq/frames.hpp"

namespace fsq {

BodyWrench mix_forces(const QuadParams& p, const MotorSet& m) {
  double f[4];
  for (int i = 0; i < 4; i++) {
    f[i] = m.failed[i] ? 0.0 : m.f[i];
    if (f[i] < 0.0) throw DomainError("negative thrust commanded on live motor");
    if (!std::isfinite(f[i])) throw DomainError("non-finite thrust");
  }
  BodyWrench w;
  w.F = f[0] + f[1] + f[2] + f[3];
  w.tau_phi = p.l * (f[1] - f[3]);
  w.tau_theta = p.l * (f[2] - f[0]);
  w.tau_psi = (p.kt / p.kf) * (f[0] - f[1] + f[2] - f[3]);
  // (-1)^i signs: motors 1,3 spin one way, 2,4 the other.
  w.Omega = -std::sqrt(f[0] / p.kf) + std::sqrt(f[1] / p.kf) - std::sqrt(f[2] / p.kf) +
            std::sqrt(f[3] / p.kf);
  return w;
}

Eigen::Vector3d translational_accel(const QuadParams& p, double phi, double theta,
                                    double psi, double F) {
  const double cf = std::cos(phi), sf = std::sin(phi);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(psi), sp = std::sin(psi);
  const double a = F / p.M;
  return {(cf * st * cp + sf * sp) * a,
          (cf * st * sp - sf * cp) * a,
          cf * ct * a - p.g};
}

Eigen::Vector3d rotational_accel(const QuadParams& p, double pr, double qr, double rr,
                                 const BodyWrench& w) {
  const double pd = w.tau_phi / p.Jxx - (p.Jzz - p.Jyy) / p.Jxx * qr * rr -
                    (p.Jp / p.Jxx) * qr * w.Omega;
  const double qd = w.tau_theta / p.Jyy - (p.Jxx - p.Jzz) / p.Jyy * pr * rr -
                    (p.Jp / p.Jyy) * pr * w.Omega;
  const double rd = w.tau_psi / p.Jzz - (p.Jyy - p.Jxx) / p.Jzz * pr * qr -
                    p.gamma * rr * std::abs(rr) / p.Jzz;
  return {pd, qd, rd};
}

namespace {

using Vec12 = std::array<double, 12>;

Vec12 derivs(const QuadParams& p, const Vec12& y, const BodyWrench& w) {
  const double phi = y[6], theta = y[7], psi = y[8];
  const Eigen::Vector3d acc = translational_accel(p, phi, theta, psi, w.F);
  const Eigen::Vector3d erate = body_to_euler_rates(phi, theta, y[9], y[10], y[11]);
  const Eigen::Vector3d wdot = rotational_accel(p, y[9], y[10], y[11], w);
  return {y[3], y[4],     y[5],     acc[0],   acc[1],   acc[2],
          erate[0], erate[1], erate[2], wdot[0],  wdot[1],  wdot[2]};
}

}  // namespace

RigidState step(const QuadParams& p, const RigidState& s, const MotorSet& m, double dt) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
  if (std::abs(s.theta) > M_PI / 2 - dt)
    throw SingularityError("step: pitch within dt of +-pi/2");
  const BodyWrench w = mix_forces(p, m);

  const Vec12 y0 = s.to_array();
  auto add = [](const Vec12& a, const Vec12& b, double h) {
    Vec12 out;
    for (int i = 0; i < 12; i++) out[i] = a[i] + h * b[i];
    return out;
  };
  const Vec12 k1 = derivs(p, y0, w);
  const Vec12 k2 = derivs(p, add(y0, k1, dt / 2), w);
  const Vec12 k3 = derivs(p, add(y0, k2, dt / 2), w);
  const Vec12 k4 = derivs(p, add(y0, k3, dt), w);
  Vec12 y1;
  for (int i = 0; i < 12; i++)
    y1[i] = y0[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  for (double v : y1)
    if (!std::isfinite(v)) throw DomainError("step: state diverged to non-finite values");
  return RigidState::from_array(y1);
}

RigidState DcmState::to_rigid() const {
  RigidState s;
  s.x = pos[0]; s.y = pos[1]; s.z = pos[2];
  s.xd = vel[0]; s.yd = vel[1]; s.zd = vel[2];
  const EulerAngles e = euler_from_rotation(R);
  s.phi = e.phi; s.theta = e.theta; s.psi = e.psi;
  s.p = omega[0]; s.q = omega[1]; s.r = omega[2];
  return s;
}

DcmState DcmState::from_rigid(const RigidState& s) {
  DcmState d;
  d.pos = {s.x, s.y, s.z};
  d.vel = {s.xd, s.yd, s.zd};
  d.R = rot_body_to_inertial(s.phi, s.theta, s.psi);
  d.omega = {s.p, s.q, s.r};
  return d;
}

namespace {

struct DcmDeriv {
  Eigen::Vector3d dpos, dvel, domega;
  Eigen::Matrix3d dR;
};

DcmDeriv dcm_derivs(const QuadParams& p, const DcmState& s, const BodyWrench& w) {
  DcmDeriv d;
  d.dpos = s.vel;
  // Thrust along body z, gravity down; same force model as translational_accel.
  d.dvel = s.R.col(2) * (w.F / p.M) - Eigen::Vector3d(0, 0, p.g);
  Eigen::Matrix3d sk;
  sk << 0, -s.omega[2], s.omega[1],
        s.omega[2], 0, -s.omega[0],
        -s.omega[1], s.omega[0], 0;
  d.dR = s.R * sk;
  d.domega = rotational_accel(p, s.omega[0], s.omega[1], s.omega[2], w);
  return d;
}

}  // namespace

DcmState step_dcm(const QuadParams& p, const DcmState& s, const MotorSet& m, double dt) {
  if (!(dt > 0.0)) throw DomainError("step_dcm: dt must be positive");
  const BodyWrench w = mix_forces(p, m);
  auto advance = [&](const DcmState& base, const DcmDeriv& k, double h) {
    DcmState out = base;
    out.pos = s.pos + h * k.dpos;
    out.vel = s.vel + h * k.dvel;
    out.R = s.R + h * k.dR;
    out.omega = s.omega + h * k.domega;
    return out;
  };
  const DcmDeriv k1 = dcm_derivs(p, s, w);
  const DcmDeriv k2 = dcm_derivs(p, advance(s, k1, dt / 2), w);
  const DcmDeriv k3 = dcm_derivs(p, advance(s, k2, dt / 2), w);
  const DcmDeriv k4 = dcm_derivs(p, advance(s, k3, dt), w);
  DcmState out = s;
  out.pos += dt / 6.0 * (k1.dpos + 2 * k2.dpos + 2 * k3.dpos + k4.dpos);
  out.vel += dt / 6.0 * (k1.dvel + 2 * k2.dvel + 2 * k3.dvel + k4.dvel);
  out.R += dt / 6.0 * (k1.dR + 2 * k2.dR + 2 * k3.dR + k4.dR);
  out.omega += dt / 6.0 * (k1.domega + 2 * k2.domega + 2 * k3.domega + k4.domega);
  out.R = orthonormalized(out.R);
  return out;
}

}  // namespace fsq

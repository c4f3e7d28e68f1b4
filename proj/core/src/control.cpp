#include "fsq/control.hpp"

#include <algorithm>
#include <cmath>

#include "fsq/errors.hpp"
#include "fsq/frames.hpp"

namespace fsq {

double pid_step(const PidGains& g, PidState& s, double err, double err_rate, double dt) {
  const double integ_cand = s.integ + err * dt;
  double u = g.kp * err + g.kd * err_rate + g.ki * integ_cand;
  if (u > g.out_max) {
    if (err <= 0) s.integ = integ_cand;  // error pulls back in: keep integrating
    return g.out_max;
  }
  if (u < g.out_min) {
    if (err >= 0) s.integ = integ_cand;
    return g.out_min;
  }
  s.integ = integ_cand;
  return u;
}

Eigen::Vector3d outer_accel(const OuterConfig& cfg, const Eigen::Vector3d& pos_err,
                            const Eigen::Vector3d& vel_err) {
  auto shape = [](double wn, double zeta, double pe, double ve) {
    return -2.0 * zeta * wn * ve - wn * wn * pe;
  };
  Eigen::Vector3d a;
  a.x() = shape(cfg.wn_x, cfg.zeta_x, pos_err.x(), vel_err.x());
  a.y() = shape(cfg.wn_y, cfg.zeta_y, pos_err.y(), vel_err.y());
  a.z() = shape(cfg.wn_z, cfg.zeta_z, pos_err.z(), vel_err.z());
  a.x() = std::clamp(a.x(), -cfg.cap_xy, cfg.cap_xy);
  a.y() = std::clamp(a.y(), -cfg.cap_xy, cfg.cap_xy);
  a.z() = std::clamp(a.z(), -cfg.cap_z, cfg.cap_z);
  return a;
}

Eigen::Vector3d desired_axis(const Eigen::Vector3d& accel_des, double Fbar, double nz_bar,
                             const Eigen::Matrix3d& R_v_to_b, const QuadParams& params) {
  const double denom = nz_bar * Fbar;
  if (std::abs(denom) < 1e-12) throw DomainError("desired_axis: zero nz_bar*Fbar");
  const Eigen::Vector3d demand =
      params.M * accel_des - params.M * Eigen::Vector3d(0, 0, -params.g);
  const Eigen::Vector3d v = R_v_to_b * (demand / denom);
  const double n = v.norm();
  if (!(n > 1e-9)) throw DomainError("desired_axis: degenerate acceleration demand");
  return v / n;
}

MotorSet inner_thrusts(const ControllerConfig& cfg, const FailureConfig& failure,
                       const Equilibrium& eq, const Eigen::MatrixXd& K,
                       const Eigen::Vector4d& s_err, double phi, double theta,
                       const std::array<double, 4>& u_f, double u_z) {
  const Eigen::VectorXd u = -K * s_err;
  const auto mask = failure.mask();

  double tilt_term = 0;
  if (!failure.is_single()) {
    const double cc = std::cos(phi) * std::cos(theta);
    if (std::abs(phi) >= M_PI / 2 || std::abs(theta) >= M_PI / 2 || std::abs(cc) < 1e-6)
      throw DomainError("inner_thrusts: tilt compensation undefined at 90 deg");
    tilt_term = u_z / cc;
  }

  MotorSet out{};
  int k = 0;
  for (int i = 0; i < 4; ++i) {
    out.failed[i] = mask[i];
    if (mask[i]) {
      out.f[i] = 0;
      continue;
    }
    double f = u(k) + eq.fbar[i];
    f += failure.is_single() ? u_f[i] : tilt_term;
    out.f[i] = std::clamp(f, 0.0, cfg.f_max);
    ++k;
  }
  return out;
}

FailsafeController::FailsafeController(const QuadParams& model, const FailureConfig& failure,
                                       const Equilibrium& eq, const ControllerConfig& cfg)
    : model_(model), failure_(failure), eq_(eq), cfg_(cfg) {
  const LinearModel lin = linearize_measured(model, failure, eq);
  K_ = lqr_gain(lin, cfg.weights);
}

void FailsafeController::outer_update(const Eigen::Vector3d& est_pos,
                                      const Eigen::Vector3d& est_vel,
                                      const Eigen::Vector3d& ref_pos,
                                      const Eigen::Vector3d& ref_vel) {
  diag_.a_des = outer_accel(cfg_.outer, est_pos - ref_pos, est_vel - ref_vel);
}

MotorSet FailsafeController::inner_update(const RigidState& est, double z_ref, double dt) {
  const Eigen::Matrix3d Rib = rot_inertial_to_body(est.phi, est.theta, est.psi);
  const Eigen::Vector3d n_des = desired_axis(diag_.a_des, eq_.Fbar, eq_.n[2], Rib, model_);
  diag_.n_des_body = n_des;

  Eigen::Vector4d s_err;
  s_err << est.p - eq_.pbar, est.q - eq_.qbar, n_des.x() - eq_.n[0], n_des.y() - eq_.n[1];

  diag_.u_f = {0, 0, 0, 0};
  diag_.u_z = 0;
  if (failure_.is_single()) {
    // Total-lift demand along the spin axis, split across survivors in
    // proportion to their trim share, each trimmed by its own PI loop.
    const Eigen::Vector3d force =
        model_.M * diag_.a_des + Eigen::Vector3d(0, 0, model_.M * model_.g);
    const double F_cmd = force.norm() / std::abs(eq_.n[2]);
    const double dF = F_cmd - eq_.Fbar;
    for (int i = 0; i < 4; ++i) {
      if (failure_.mask()[i]) continue;
      const double share = eq_.fbar[i] / eq_.Fbar * dF;
      diag_.u_f[i] = pid_step(cfg_.force_pids[i], force_pids_[i], share, 0.0, dt);
    }
  } else {
    diag_.u_z = pid_step(cfg_.altitude_pid, alt_pid_, z_ref - est.z, -est.zd, dt);
  }

  // Near the tilt-compensation singularity the altitude term is meaningless;
  // drop it rather than aborting the flight (spin-axis regulation continues).
  const double cc = std::cos(est.phi) * std::cos(est.theta);
  const bool tilt_ok = failure_.is_single() || std::abs(cc) > 0.05;
  return inner_thrusts(cfg_, failure_, eq_, K_, s_err, tilt_ok ? est.phi : 0.0,
                       tilt_ok ? est.theta : 0.0, diag_.u_f, tilt_ok ? diag_.u_z : 0.0);
}

NominalController::NominalController(const QuadParams& model, double f_max)
    : model_(model), f_max_(f_max) {}

MotorSet NominalController::update(const RigidState& est, const Eigen::Vector3d& ref_pos,
                                   double dt) {
  (void)dt;
  // position -> desired acceleration (gentle, capped)
  const double kp_pos = 1.0, kd_pos = 1.6;
  const double kp_z = 6.0, kd_z = 4.5;
  double ax = std::clamp(kp_pos * (ref_pos.x() - est.x) - kd_pos * est.xd, -3.0, 3.0);
  double ay = std::clamp(kp_pos * (ref_pos.y() - est.y) - kd_pos * est.yd, -3.0, 3.0);
  double az = std::clamp(kp_z * (ref_pos.z() - est.z) - kd_z * est.zd, -5.0, 5.0);

  // acceleration -> attitude reference in the current yaw frame
  const double c = std::cos(est.psi), s = std::sin(est.psi);
  const double axb = c * ax + s * ay;
  const double ayb = -s * ax + c * ay;
  const double theta_ref = std::clamp(axb / model_.g, -0.35, 0.35);
  const double phi_ref = std::clamp(-ayb / model_.g, -0.35, 0.35);

  const double kp_att = 30.0, kd_att = 8.0, kd_yaw = 3.0;
  const double tau_phi = model_.Jxx * (kp_att * (phi_ref - est.phi) - kd_att * est.p);
  const double tau_theta = model_.Jyy * (kp_att * (theta_ref - est.theta) - kd_att * est.q);
  const double tau_psi = model_.Jzz * (-kd_yaw * est.r);

  const double cc = std::max(std::cos(est.phi) * std::cos(est.theta), 0.3);
  const double F = model_.M * (model_.g + az) / cc;
  const double eps = model_.kt / model_.kf;

  MotorSet out{};
  out.f[0] = F / 4 - tau_theta / (2 * model_.l) + tau_psi / (4 * eps);
  out.f[1] = F / 4 + tau_phi / (2 * model_.l) - tau_psi / (4 * eps);
  out.f[2] = F / 4 + tau_theta / (2 * model_.l) + tau_psi / (4 * eps);
  out.f[3] = F / 4 - tau_phi / (2 * model_.l) - tau_psi / (4 * eps);
  for (double& f : out.f) f = std::clamp(f, 0.0, f_max_);
  return out;
}

}  // namespace fsq

#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>

#include "fsq/equilibrium.hpp"
#include "fsq/lqr.hpp"
#include "fsq/params.hpp"
#include "fsq/state.hpp"

namespace fsq {

struct PidGains {
  double kp = 0, ki = 0, kd = 0;
  double out_min = -1e30, out_max = 1e30;
};

struct PidState {
  double integ = 0;
};

// u = kp*err + kd*err_rate + ki*integral, clamped to [out_min, out_max].
// Conditional integration: the integrator freezes whenever the output is
// pinned at a bound and the error would push it further out.
double pid_step(const PidGains& g, PidState& s, double err, double err_rate, double dt);

// Per-axis desired-acceleration shaping: a = -2*zeta*wn*vel_err - wn^2*pos_err,
// then capped (xy share one cap, z has its own). A zeroed channel
// (wn = zeta = 0) emits exactly 0.
struct OuterConfig {
  double wn_x = 0, zeta_x = 0;
  double wn_y = 0, zeta_y = 0;
  double wn_z = 0, zeta_z = 0;
  double cap_xy = 1e30;  // |a_des_x|, |a_des_y| cap   [m/s^2]
  double cap_z = 1e30;   // |a_des_z| cap              [m/s^2]
};

Eigen::Vector3d outer_accel(const OuterConfig& cfg, const Eigen::Vector3d& pos_err,
                            const Eigen::Vector3d& vel_err);

// Desired spin-axis direction, body frame:
//   n_des = normalize( R_v_to_b * (M*accel_des - M*(0,0,-g)) / (nz_bar * Fbar) )
// The signed nz_bar flips the axis for equilibria that spin about the
// downward direction. Throws DomainError when the demanded specific force
// vanishes (free-fall demand) or nz_bar*Fbar is zero.
Eigen::Vector3d desired_axis(const Eigen::Vector3d& accel_des, double Fbar, double nz_bar,
                             const Eigen::Matrix3d& R_v_to_b, const QuadParams& params);

// Everything the fail-safe controller needs beyond the equilibrium itself.
struct ControllerConfig {
  LqrWeights weights;
  PidGains altitude_pid;                  // two-propeller altitude channel
  std::array<PidGains, 4> force_pids;     // three-propeller per-motor thrust trim
  OuterConfig outer;
  double f_max = 9.0;                     // per-motor thrust ceiling [N]
  double f_inner = 450.0;                 // inner-loop rate [Hz]
  double f_outer = 45.0;                  // outer-loop rate [Hz]
};

// Pure inner-loop mapping: thrust deviations u = -K*s_err stacked onto the
// equilibrium thrusts plus the altitude/trim terms, clamped to [0, f_max].
//  - three propellers: f_i = u_i + fbar_i + u_f[i]
//  - two propellers:   f_i = u_i + fbar_i + u_z / (cos(phi)*cos(theta))
// Failed motors stay at exactly 0. Throws DomainError when |phi| or |theta|
// reaches 90 deg (tilt compensation divides by cos*cos).
MotorSet inner_thrusts(const ControllerConfig& cfg, const FailureConfig& failure,
                       const Equilibrium& eq, const Eigen::MatrixXd& K,
                       const Eigen::Vector4d& s_err, double phi, double theta,
                       const std::array<double, 4>& u_f, double u_z);

// What the controller consumed/produced on one tick, for logging.
struct ControlDiag {
  Eigen::Vector3d a_des{0, 0, 0};
  Eigen::Vector3d n_des_body{0, 0, 0};
  double u_z = 0;
  std::array<double, 4> u_f{0, 0, 0, 0};
};

// Stateful fail-safe controller: LQR spin-axis regulation (gains from the
// measured-feedback linearization) + altitude handling per architecture +
// outer position loop. The model parameters may differ from the plant.
class FailsafeController {
 public:
  FailsafeController(const QuadParams& model, const FailureConfig& failure,
                     const Equilibrium& eq, const ControllerConfig& cfg);

  // Recompute the desired acceleration from held position feedback (runs at
  // the outer rate). ref_vel is the reference velocity (usually zero).
  void outer_update(const Eigen::Vector3d& est_pos, const Eigen::Vector3d& est_vel,
                    const Eigen::Vector3d& ref_pos, const Eigen::Vector3d& ref_vel);

  // One inner tick from the estimated state; returns motor commands.
  MotorSet inner_update(const RigidState& est, double z_ref, double dt);

  const ControlDiag& diag() const { return diag_; }
  const Equilibrium& equilibrium() const { return eq_; }
  const Eigen::MatrixXd& gain() const { return K_; }

 private:
  QuadParams model_;
  FailureConfig failure_;
  Equilibrium eq_;
  ControllerConfig cfg_;
  Eigen::MatrixXd K_;
  PidState alt_pid_{};
  std::array<PidState, 4> force_pids_{};
  ControlDiag diag_;
};

// Plain four-motor hover/attitude-hold controller used before a failure is
// detected. Gains are fixed plumbing, tuned only to hold position calmly.
class NominalController {
 public:
  NominalController(const QuadParams& model, double f_max);
  MotorSet update(const RigidState& est, const Eigen::Vector3d& ref_pos, double dt);

 private:
  QuadParams model_;
  double f_max_;
};

}  // namespace fsq

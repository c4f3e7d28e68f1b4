#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fsq/equilibrium.hpp"
#include "fsq/params.hpp"

namespace fsq {

// Reduced attitude state about the spin equilibrium: s = (p, q, nx, ny),
// with nz frozen at its equilibrium value (local chart) and r frozen at rbar.
//
// Two sign conventions for the axis rows are carried side by side:
//  - AxisConvention::spin_frame — the textbook form, axis kinematics
//    dn/dt = +omega x n. linearize() returns this.
//  - AxisConvention::measured — the Jacobian of the feedback signal the
//    flight controller actually builds, n = R_inertial_to_body * n_des,
//    whose exact kinematics is dn/dt = -omega x n. Gains flown in closed
//    loop come from this one; the two differ only in the sign of rows 3-4.
enum class AxisConvention { spin_frame, measured };

struct LinearModel {
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  Eigen::MatrixXd B;                // 4 x (#survivors), columns in motor order
  std::vector<int> motors;          // 1-based survivor indices for B's columns
  AxisConvention convention = AxisConvention::spin_frame;
};

// Nonlinear reduced dynamics used both by the controller design and as the
// oracle that linearize() must match: body-rate rows from rotational_accel
// with r frozen at rbar, axis rows from the convention's omega-cross form
// with nz frozen. u holds thrust deviations for the surviving motors (same
// order as LinearModel.motors).
Eigen::Vector4d reduced_rates(const QuadParams& p, const FailureConfig& cfg,
                              const Equilibrium& eq, const Eigen::Vector4d& s,
                              const Eigen::VectorXd& u, AxisConvention conv);

LinearModel linearize(const QuadParams& p, const FailureConfig& cfg, const Equilibrium& eq);
LinearModel linearize_measured(const QuadParams& p, const FailureConfig& cfg,
                               const Equilibrium& eq);

// Diagonal LQR weights keyed by state (p, q, nx, ny) and by motor.
struct LqrWeights {
  double Q_p = 0, Q_q = 0, Q_nx = 0, Q_ny = 0;
  std::array<double, 4> R_f{1, 1, 1, 1};  // per motor; failed entries ignored

  Eigen::Matrix4d Q() const;
  Eigen::MatrixXd R(const std::vector<int>& motors) const;  // diag, survivor order
};

struct CareResult {
  Eigen::MatrixXd P;         // stabilizing solution
  Eigen::MatrixXd K;         // R^-1 B^T P
  double residual_inf = 0;   // ||A'P + PA - PBR^-1B'P + Q||_inf
};

// Continuous algebraic Riccati equation via Newton-Kleinman iterations,
// seeded with a stabilizing gain from eigenvalue-shifted Lyapunov solves.
// Accepts Q >= 0 (only the pair (A,B) must be stabilizable); R must be
// positive definite. Throws ConvergenceError if the residual cannot be
// driven below 1e-10, DomainError for unstabilizable pairs.
CareResult solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

// Convenience: gains for a model + weights.
Eigen::MatrixXd lqr_gain(const LinearModel& model, const LqrWeights& w);

}  // namespace fsq

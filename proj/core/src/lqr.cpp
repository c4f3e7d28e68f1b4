#include "fsq/lqr.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "fsq/dynamics.hpp"
#include "fsq/errors.hpp"

namespace fsq {
namespace {

std::vector<int> survivors(const FailureConfig& cfg) {
  std::vector<int> out;
  auto mask = cfg.mask();
  for (int i = 1; i <= 4; i++)
    if (!mask[i - 1]) out.push_back(i);
  return out;
}

}  // namespace

Eigen::Vector4d reduced_rates(const QuadParams& p, const FailureConfig& cfg,
                              const Equilibrium& eq, const Eigen::Vector4d& s,
                              const Eigen::VectorXd& u, AxisConvention conv) {
  const std::vector<int> live = survivors(cfg);
  if (u.size() != static_cast<int>(live.size()))
    throw DomainError("reduced_rates: input size does not match survivor count");
  MotorSet m;
  m.failed = cfg.mask();
  for (size_t i = 0; i < live.size(); i++) {
    double f = eq.fbar[live[i] - 1] + u[static_cast<int>(i)];
    m.f[live[i] - 1] = std::max(f, 0.0);
  }
  const BodyWrench w = mix_forces(p, m);
  const double pr = s[0], qr = s[1];
  const Eigen::Vector3d wdot = rotational_accel(p, pr, qr, eq.rbar, w);

  // Axis rows: omega x n with nz frozen at the equilibrium value and r at
  // rbar; the measured convention carries the opposite sign.
  const double nz = eq.n[2];
  const double sign = (conv == AxisConvention::spin_frame) ? 1.0 : -1.0;
  const double nxd = sign * (qr * nz - eq.rbar * s[3]);
  const double nyd = sign * (eq.rbar * s[2] - pr * nz);
  return {wdot[0], wdot[1], nxd, nyd};
}

namespace {

LinearModel linearize_impl(const QuadParams& p, const FailureConfig& cfg,
                           const Equilibrium& eq, AxisConvention conv) {
  LinearModel m;
  m.convention = conv;
  m.motors = survivors(cfg);

  const double Omega = -eq.wbar[0] + eq.wbar[1] - eq.wbar[2] + eq.wbar[3];
  // Jacobian of the body-rate rows at (pbar, qbar, rbar); qbar/pbar terms
  // vanish because one of them is always zero at a spin equilibrium.
  const double abar = -((p.Jzz - p.Jyy) / p.Jxx * eq.rbar + p.Jp / p.Jxx * Omega);
  const double bbar = -((p.Jxx - p.Jzz) / p.Jyy * eq.rbar + p.Jp / p.Jyy * Omega);

  const double sign = (conv == AxisConvention::spin_frame) ? 1.0 : -1.0;
  const double nz = eq.n[2];
  m.A(0, 1) = abar;
  m.A(1, 0) = bbar;
  m.A(2, 1) = sign * nz;
  m.A(2, 3) = sign * -eq.rbar;
  m.A(3, 0) = sign * -nz;
  m.A(3, 2) = sign * eq.rbar;

  m.B = Eigen::MatrixXd::Zero(4, static_cast<int>(m.motors.size()));
  for (size_t i = 0; i < m.motors.size(); i++) {
    switch (m.motors[i]) {
      case 1: m.B(1, static_cast<int>(i)) = -p.l / p.Jyy; break;
      case 2: m.B(0, static_cast<int>(i)) = p.l / p.Jxx; break;
      case 3: m.B(1, static_cast<int>(i)) = p.l / p.Jyy; break;
      case 4: m.B(0, static_cast<int>(i)) = -p.l / p.Jxx; break;
    }
  }
  return m;
}

}  // namespace

LinearModel linearize(const QuadParams& p, const FailureConfig& cfg, const Equilibrium& eq) {
  return linearize_impl(p, cfg, eq, AxisConvention::spin_frame);
}

LinearModel linearize_measured(const QuadParams& p, const FailureConfig& cfg,
                               const Equilibrium& eq) {
  return linearize_impl(p, cfg, eq, AxisConvention::measured);
}

Eigen::Matrix4d LqrWeights::Q() const {
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  q.diagonal() << Q_p, Q_q, Q_nx, Q_ny;
  return q;
}

Eigen::MatrixXd LqrWeights::R(const std::vector<int>& motors) const {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<int>(motors.size()),
                                            static_cast<int>(motors.size()));
  for (size_t i = 0; i < motors.size(); i++)
    r(static_cast<int>(i), static_cast<int>(i)) = R_f[motors[i] - 1];
  return r;
}

namespace {

// Solve X A + A^T X = -W by vectorization (n is tiny here).
Eigen::MatrixXd lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& W) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd M = Eigen::kroneckerProduct(I, A.transpose()).eval() +
                      Eigen::kroneckerProduct(A.transpose(), I).eval();
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(W.data(), n * n);
  Eigen::VectorXd x = M.fullPivLu().solve(-w);
  Eigen::MatrixXd X = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
  return 0.5 * (X + X.transpose());  // symmetrize away roundoff
}

double max_real_eig(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M);
  return es.eigenvalues().real().maxCoeff();
}

// Bass-style stabilizing seed: shift A so -(A + beta I) is stable, solve the
// shifted Lyapunov equation for Z > 0, take K0 = B^T Z^-1.
Eigen::MatrixXd stabilizing_seed(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(A.rows());
  double beta = 2.0 * A.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  for (int attempt = 0; attempt < 8; attempt++) {
    const Eigen::MatrixXd As = -(A + beta * Eigen::MatrixXd::Identity(n, n));
    // As is stable; Z As^T + As Z = -2 B B^T  =>  Z > 0 on the controllable
    // subspace. Regularize slightly so Z stays invertible when (A,B) is only
    // stabilizable.
    Eigen::MatrixXd W = 2.0 * B * B.transpose() +
                        1e-12 * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd Z = lyapunov(As.transpose(), W);
    Eigen::MatrixXd K = B.transpose() * Z.fullPivLu().solve(
                                            Eigen::MatrixXd::Identity(n, n));
    if (max_real_eig(A - B * K) < 0.0) return K;
    beta *= 2.0;
  }
  throw DomainError("solve_care: could not find a stabilizing initial gain");
}

}  // namespace

CareResult solve_care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != B.cols() || R.cols() != B.cols())
    throw DomainError("solve_care: inconsistent dimensions");
  Eigen::LLT<Eigen::MatrixXd> rchol(R);
  if (rchol.info() != Eigen::Success)
    throw DomainError("solve_care: R must be positive definite");

  auto residual = [&](const Eigen::MatrixXd& P) {
    Eigen::MatrixXd res = A.transpose() * P + P * A -
                          P * B * rchol.solve(B.transpose() * P) + Q;
    return res;
  };

  Eigen::MatrixXd K = stabilizing_seed(A, B);
  Eigen::MatrixXd P;
  double best = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 60; iter++) {
    const Eigen::MatrixXd Ac = A - B * K;
    const Eigen::MatrixXd W = Q + K.transpose() * R * K;
    P = lyapunov(Ac, W);
    K = rchol.solve(B.transpose() * P);
    const double res = residual(P).cwiseAbs().maxCoeff();
    if (res < best) best = res;
    if (res < 1e-10) {
      CareResult out;
      out.P = P;
      out.K = K;
      out.residual_inf = res;
      return out;
    }
  }
  throw ConvergenceError("solve_care: Newton-Kleinman residual stalled at " +
                         std::to_string(best));
}

Eigen::MatrixXd lqr_gain(const LinearModel& model, const LqrWeights& w) {
  const CareResult res = solve_care(model.A, model.B, w.Q(), w.R(model.motors));
  return res.K;
}

}  // namespace fsq

#include "fsq/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "fsq/dynamics.hpp"
#include "fsq/errors.hpp"

#include <Eigen/Dense>

namespace fsq {

void FailureConfig::validate_set() const {
  if (failed.empty()) throw ConfigError("failure set must name at least one motor");
  if (failed.size() > 4) throw ConfigError("failure set larger than the airframe");
  for (int m : failed)
    if (m < 1 || m > 4) throw ConfigError("motor index out of range 1..4");
  for (size_t i = 0; i < failed.size(); ++i)
    for (size_t j = i + 1; j < failed.size(); ++j)
      if (failed[i] == failed[j]) throw ConfigError("duplicate motor in failure set");
  if (!(rho >= 0.0 && rho <= 1.0))
    throw ConfigError("rho must lie in [0, 1]");
}

void FailureConfig::validate() const {
  validate_set();
  if (failed.size() > 2)
    throw ConfigError("no fail-safe law for more than two motors out");
  if (failed.size() == 2) {
    int a = std::min(failed[0], failed[1]);
    int b = std::max(failed[0], failed[1]);
    if (!((a == 1 && b == 3) || (a == 2 && b == 4)))
      throw ConfigError("double failure must be an opposing pair ({1,3} or {2,4})");
  }
}

std::array<bool, 4> FailureConfig::mask() const {
  std::array<bool, 4> m{false, false, false, false};
  for (int i : failed) m[i - 1] = true;
  return m;
}

std::array<double, 3> primary_axis(double p, double q, double r) {
  const double n = std::sqrt(p * p + q * q + r * r);
  if (!(n > 0.0)) throw DomainError("primary_axis: zero angular velocity");
  return {p / n, q / n, r / n};
}

double orbit_radius(double nz, double omega_norm, double g) {
  if (!(nz > 0.0 && nz <= 1.0)) throw DomainError("orbit_radius: need 0 < nz <= 1");
  if (!(omega_norm > 0.0)) throw DomainError("orbit_radius: need omega_norm > 0");
  if (!(g > 0.0)) throw DomainError("orbit_radius: need g > 0");
  return std::sqrt(1.0 - nz * nz) / nz * g / (omega_norm * omega_norm);
}

namespace {

int opposite_motor(int m) { return m <= 2 ? m + 2 : m - 2; }

// Shared geometry of a single-motor failure: which motors form the equal
// pair, which one runs at rho times the pair, and the spin direction.
struct SingleLayout {
  int failed;
  int opp;           // survivor opposite the failed motor
  int pair_a, pair_b;
  bool lead_is_q;    // roll torque unbalanced -> q leads; else p leads
  double spin_sign;  // sign of rbar
};

SingleLayout single_layout(int failed) {
  SingleLayout L{};
  L.failed = failed;
  L.opp = opposite_motor(failed);
  if (failed == 2 || failed == 4) {
    L.pair_a = 1;
    L.pair_b = 3;
    L.lead_is_q = true;   // l*(f2-f4) != 0
    L.spin_sign = 1.0;    // pair 1,3 dominates yaw torque, +z
  } else {
    L.pair_a = 2;
    L.pair_b = 4;
    L.lead_is_q = false;  // l*(f3-f1) != 0
    L.spin_sign = -1.0;
  }
  return L;
}

MotorSet motors_from(const SingleLayout& L, double f_pair, double rho) {
  MotorSet m;
  m.failed[L.failed - 1] = true;
  m.f[L.pair_a - 1] = f_pair;
  m.f[L.pair_b - 1] = f_pair;
  m.f[L.opp - 1] = rho * f_pair;
  return m;
}

Equilibrium finish(const QuadParams& p, const MotorSet& m, double pbar, double qbar,
                   double rbar) {
  Equilibrium eq;
  for (int i = 0; i < 4; i++) {
    eq.fbar[i] = m.failed[i] ? 0.0 : m.f[i];
    eq.wbar[i] = m.failed[i] ? 0.0 : std::sqrt(m.f[i] / p.kf);
    eq.Fbar += eq.fbar[i];
  }
  eq.pbar = pbar;
  eq.qbar = qbar;
  eq.rbar = rbar;
  eq.n = primary_axis(pbar, qbar, rbar);
  eq.epsilon = p.kt / p.kf;
  const double omega_norm = std::sqrt(pbar * pbar + qbar * qbar + rbar * rbar);
  eq.Rps = orbit_radius(std::abs(eq.n[2]), omega_norm, p.g);
  return eq;
}

Equilibrium solve_pair(const QuadParams& p, const FailureConfig& cfg) {
  const bool xs_failed = cfg.mask()[0];  // {1,3} out -> fly on 2,4, spin -z
  const double f = p.M * p.g / 2.0;
  const double w = std::sqrt(f / p.kf);
  const double rbar = (xs_failed ? -1.0 : 1.0) * std::sqrt(2.0 * p.kt * w * w / p.gamma);
  MotorSet m;
  m.failed = cfg.mask();
  for (int i = 0; i < 4; i++)
    if (!m.failed[i]) m.f[i] = f;
  return finish(p, m, 0.0, 0.0, rbar);
}

Equilibrium solve_single(const QuadParams& p, const FailureConfig& cfg) {
  const SingleLayout L = single_layout(cfg.failed[0]);
  const double rho = cfg.rho;

  // Residual of (f_pair, lead rate, r): the two non-trivial rows of the
  // body-rate balance plus the average lift balance. Everything runs through
  // mix_forces/rotational_accel so the solution zeroes the real dynamics.
  auto residual = [&](const Eigen::Vector3d& u) -> Eigen::Vector3d {
    const double f_pair = u[0], lead = u[1], r = u[2];
    const double pr = L.lead_is_q ? 0.0 : lead;
    const double qr = L.lead_is_q ? lead : 0.0;
    const MotorSet m = motors_from(L, std::max(f_pair, 0.0), rho);
    const BodyWrench w = mix_forces(p, m);
    const Eigen::Vector3d wdot = rotational_accel(p, pr, qr, r, w);
    const double omega_norm = std::sqrt(lead * lead + r * r);
    const double lift = (w.F * std::abs(r) / omega_norm - p.M * p.g) / p.M;
    return {L.lead_is_q ? wdot[0] : wdot[1], wdot[2], lift};
  };

  // Seed from the opposing-pair closed form with the rho-scaled survivor
  // folded in; keeps the solve continuous in rho down to 0.
  const double eps = p.kt / p.kf;
  Eigen::Vector3d u;
  u[0] = p.M * p.g / (2.0 + rho);
  u[2] = L.spin_sign * std::sqrt(eps * (2.0 - rho) * u[0] / p.gamma);
  {
    const MotorSet m0 = motors_from(L, u[0], rho);
    const BodyWrench w0 = mix_forces(p, m0);
    const double lever = L.lead_is_q ? w0.tau_phi : w0.tau_theta;
    const double denom = L.lead_is_q
                             ? (p.Jzz - p.Jyy) * u[2] + p.Jp * w0.Omega
                             : (p.Jxx - p.Jzz) * u[2] + p.Jp * w0.Omega;
    u[1] = (denom != 0.0) ? lever / denom : 0.0;
  }

  const double tol = 1e-12;
  Eigen::Vector3d res = residual(u);
  for (int iter = 0; iter < 200; iter++) {
    if (res.cwiseAbs().maxCoeff() < tol) {
      const double pr = L.lead_is_q ? 0.0 : u[1];
      const double qr = L.lead_is_q ? u[1] : 0.0;
      return finish(p, motors_from(L, u[0], rho), pr, qr, u[2]);
    }
    // Central-difference Jacobian; the system is small and smooth.
    Eigen::Matrix3d J;
    for (int j = 0; j < 3; j++) {
      const double h = std::max(1e-7 * std::abs(u[j]), 1e-9);
      Eigen::Vector3d up = u, um = u;
      up[j] += h;
      um[j] -= h;
      J.col(j) = (residual(up) - residual(um)) / (2.0 * h);
    }
    const Eigen::Vector3d step = J.fullPivLu().solve(-res);
    double alpha = 1.0;
    bool improved = false;
    for (int back = 0; back < 40; back++) {
      Eigen::Vector3d trial = u + alpha * step;
      if (trial[0] > 0.0 && std::abs(trial[2]) > 1e-9) {
        Eigen::Vector3d tres = residual(trial);
        if (tres.norm() < res.norm() || tres.cwiseAbs().maxCoeff() < tol) {
          u = trial;
          res = tres;
          improved = true;
          break;
        }
      }
      alpha /= 2.0;
    }
    if (!improved)
      throw ConvergenceError("solve_equilibrium: Newton stalled (residual " +
                             std::to_string(res.norm()) + ")");
  }
  throw ConvergenceError("solve_equilibrium: no convergence after 200 iterations");
}

}  // namespace

Equilibrium solve_equilibrium(const QuadParams& p, const FailureConfig& cfg) {
  p.validate();
  cfg.validate();
  if (!cfg.is_single()) return solve_pair(p, cfg);
  if (cfg.rho == 0.0) {
    // Degenerate single failure: the opposite motor is unused, identical to
    // losing the whole pair.
    FailureConfig pair_cfg;
    int f = cfg.failed[0];
    pair_cfg.failed = {f, opposite_motor(f)};
    Equilibrium eq = solve_pair(p, pair_cfg);
    // Report the failure set the caller asked about: the opposite motor is
    // live, just commanded to zero.
    return eq;
  }
  return solve_single(p, cfg);
}

std::array<double, 3> equilibrium_residual(const QuadParams& p, const FailureConfig& cfg,
                                           const Equilibrium& eq) {
  MotorSet m;
  m.failed = cfg.mask();
  m.f = eq.fbar;
  const BodyWrench w = mix_forces(p, m);
  const Eigen::Vector3d wdot = rotational_accel(p, eq.pbar, eq.qbar, eq.rbar, w);
  return {wdot[0], wdot[1], wdot[2]};
}

}  // namespace fsq

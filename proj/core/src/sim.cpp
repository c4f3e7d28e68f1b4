#include "fsq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>

#include "fsq/detect.hpp"
#include "fsq/dynamics.hpp"
#include "fsq/errors.hpp"
#include "fsq/frames.hpp"

namespace fsq {

const std::vector<std::string>& SimLog::columns() {
  static const std::vector<std::string> cols = {
      "t",    "x",    "y",    "z",    "xd",   "yd",   "zd",   "phi",  "theta",
      "psi",  "p",    "q",    "r",    "ex",   "ey",   "ez",   "exd",  "eyd",
      "ezd",  "ephi", "etheta", "epsi", "ep",  "eq",   "er",   "f1",   "f2",
      "f3",   "f4",   "uz",   "uf1",  "uf2",  "uf3",  "uf4",  "adx",  "ady",
      "adz",  "ndx",  "ndy",  "ndz",  "refx", "refy", "refz", "detected",
      "failsafe"};
  return cols;
}

void write_csv(const SimLog& log, std::ostream& out) {
  const auto& cols = SimLog::columns();
  for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  char buf[32];
  for (const LogRow& row : log.rows) {
    std::string line;
    line.reserve(16 * row.size());
    for (size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.12g", row[i]);
      if (i) line += ',';
      line += buf;
    }
    line += '\n';
    out << line;
  }
}

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& a) {
  Eigen::Matrix3d m;
  m << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
  return m;
}

// Minimal rotation taking unit vector u onto unit vector v.
Eigen::Matrix3d rotation_between(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
  const Eigen::Vector3d a = u.cross(v);
  const double c = u.dot(v);
  const double s2 = a.squaredNorm();
  if (s2 < 1e-24) {
    if (c > 0) return Eigen::Matrix3d::Identity();
    const Eigen::Vector3d perp = (std::abs(u.x()) < 0.9 ? u.cross(Eigen::Vector3d::UnitX())
                                                        : u.cross(Eigen::Vector3d::UnitY()))
                                     .normalized();
    return Eigen::AngleAxisd(M_PI, perp).toRotationMatrix();
  }
  const Eigen::Matrix3d ax = skew(a);
  return Eigen::Matrix3d::Identity() + ax + ax * ax * ((1 - c) / s2);
}

bool state_sane(const DcmState& s) {
  return s.pos.allFinite() && s.vel.allFinite() && s.R.allFinite() && s.omega.allFinite() &&
         s.pos.norm() < 1e6 && s.vel.norm() < 1e6 && s.omega.norm() < 1e6;
}

bool swap_supported(const std::vector<int>& failed) {
  if (failed.size() == 1) return true;
  if (failed.size() != 2) return false;
  const int a = std::min(failed[0], failed[1]);
  const int b = std::max(failed[0], failed[1]);
  return (a == 1 && b == 3) || (a == 2 && b == 4);
}

}  // namespace

SimLog run_scenario(const ScenarioSpec& spec, bool with_rows) {
  spec.plant.validate();
  spec.model.validate();
  spec.failure.validate_set();

  SimLog log;
  log.duration = spec.duration;

  const double f_inner = spec.ctrl.f_inner;
  const double dt_inner = 1.0 / f_inner;
  const int m_sub = std::max(1, (int)std::ceil(450.0 / f_inner - 1e-9));
  const double dt_plant = dt_inner / m_sub;
  const long n_outer = std::max(1L, std::lround(f_inner / spec.ctrl.f_outer));
  const long n_ticks = std::lround(spec.duration * f_inner);

  const QuadParams& eq_params = spec.eq_from_plant ? spec.plant : spec.model;
  const bool prefailed = spec.failure_time < 0;
  if (prefailed && !swap_supported(spec.failure.failed))
    throw ConfigError(
        "scenario starts already-failed but the set has no fail-safe trim; "
        "give it a failure time instead");

  Equilibrium eq{};
  std::unique_ptr<FailsafeController> failsafe;
  NominalController nominal(spec.model, spec.ctrl.f_max);
  if (prefailed) {
    eq = solve_equilibrium(eq_params, spec.failure);
    failsafe = std::make_unique<FailsafeController>(spec.model, spec.failure, eq, spec.ctrl);
    log.failsafe_engaged = true;
    log.eq = eq;
  }

  DcmState st;
  st.pos = {spec.initial.x, spec.initial.y, spec.initial.z};
  st.vel = {spec.initial.xd, spec.initial.yd, spec.initial.zd};
  MotorSet cmd{};
  if (prefailed) {
    // Equilibrium-aligned start: spin axis vertical (down when rbar < 0),
    // then the configured attitude perturbation applied in the world frame.
    const Eigen::Vector3d nb(eq.n[0], eq.n[1], eq.n[2]);
    const double anchor = eq.rbar >= 0 ? 1.0 : -1.0;
    const Eigen::Matrix3d R0 = rotation_between(nb, anchor * Eigen::Vector3d::UnitZ());
    const Eigen::Matrix3d Rp = (Eigen::AngleAxisd(spec.initial.psi, Eigen::Vector3d::UnitZ()) *
                                Eigen::AngleAxisd(spec.initial.theta, Eigen::Vector3d::UnitY()) *
                                Eigen::AngleAxisd(spec.initial.phi, Eigen::Vector3d::UnitX()))
                                   .toRotationMatrix();
    st.R = Rp * R0;
    st.omega = {eq.pbar + spec.initial.p, eq.qbar + spec.initial.q, eq.rbar + spec.initial.r};
    for (int i = 0; i < 4; ++i) cmd.f[i] = eq.fbar[i];
    cmd.failed = spec.failure.mask();
  } else {
    st.R = rot_body_to_inertial(spec.initial.phi, spec.initial.theta, spec.initial.psi);
    st.omega = {spec.initial.p, spec.initial.q, spec.initial.r};
    for (int i = 0; i < 4; ++i) cmd.f[i] = spec.plant.M * spec.plant.g / 4.0;
  }

  SensorRates rates = spec.rates;
  rates.imu_hz = f_inner;
  SensorSampler sampler(spec.noise, rates, spec.seed);
  StateEstimator estimator(spec.filters);
  FailureDetector detector(spec.detector);

  const double t_window = 0.8 * spec.duration;
  double axis_max = 0, alt_max = 0, pos_max = 0, r_sum = 0;
  std::array<double, 4> f_sum{0, 0, 0, 0};
  long win_count = 0;
  std::vector<std::pair<double, double>> win_xy;
  win_xy.reserve((size_t)(0.2 * n_ticks) + 4);

  bool swapped = prefailed;
  bool failure_active = prefailed;
  if (with_rows) log.rows.reserve((size_t)n_ticks);

  for (long k = 0; k < n_ticks; ++k) {
    const double t = k * dt_inner;
    const RigidState truth = st.to_rigid();
    const SensorFrame frame = sampler.sample(truth, t);
    const RigidState est = estimator.update(frame, dt_inner);

    if (!failure_active && spec.failure_time >= 0 && t >= spec.failure_time - 1e-12)
      failure_active = true;

    if (!swapped) {
      detector.push(t, est.p, est.q, est.r, est.phi, est.theta);
      if (!log.detected) {
        const FailureVerdict v = detector.verdict();
        if (v.any()) {
          log.detected = true;
          log.detect_time = t;
          log.detected_motors = v.motors;
          log.detect_unknown = v.unknown;
          log.detected_correct = !v.unknown && v.motors == spec.failure.mask();
          if (!v.unknown) {
            std::vector<int> failed;
            for (int i = 0; i < 4; ++i)
              if (v.motors[i]) failed.push_back(i + 1);
            if (swap_supported(failed)) {
              FailureConfig detected_cfg;
              detected_cfg.failed = failed;
              detected_cfg.rho = spec.failure.rho;
              try {
                eq = solve_equilibrium(eq_params, detected_cfg);
                failsafe = std::make_unique<FailsafeController>(spec.model, detected_cfg, eq,
                                                                spec.ctrl);
                swapped = true;
                log.failsafe_engaged = true;
                log.eq = eq;
              } catch (const Error&) {
                // no reachable trim for the detected set: stay on the nominal law
              }
            }
          }
        }
      }
    }

    const Eigen::Vector3d ref = ref_at(spec.refs, t);
    try {
      if (swapped) {
        if (k % n_outer == 0)
          failsafe->outer_update({est.x, est.y, est.z}, {est.xd, est.yd, est.zd}, ref,
                                 Eigen::Vector3d::Zero());
        cmd = failsafe->inner_update(est, ref.z(), dt_inner);
      } else {
        cmd = nominal.update(est, ref, dt_inner);
      }
    } catch (const Error&) {
      log.crashed = true;
      log.crash_t = t;
      break;
    }

    MotorSet applied = cmd;
    if (failure_active) {
      const auto mask = spec.failure.mask();
      for (int i = 0; i < 4; ++i)
        if (mask[i]) {
          applied.f[i] = 0;
          applied.failed[i] = true;
        }
    }

    if (with_rows) {
      LogRow row{};
      row[0] = t;
      const auto ta = truth.to_array();
      const auto ea = est.to_array();
      for (int i = 0; i < 12; ++i) row[1 + i] = ta[i];
      for (int i = 0; i < 12; ++i) row[13 + i] = ea[i];
      for (int i = 0; i < 4; ++i) row[25 + i] = applied.thrust(i + 1);
      if (swapped) {
        const ControlDiag& d = failsafe->diag();
        row[29] = d.u_z;
        for (int i = 0; i < 4; ++i) row[30 + i] = d.u_f[i];
        for (int i = 0; i < 3; ++i) row[34 + i] = d.a_des(i);
        for (int i = 0; i < 3; ++i) row[37 + i] = d.n_des_body(i);
      }
      row[40] = ref.x();
      row[41] = ref.y();
      row[42] = ref.z();
      row[43] = log.detected ? 1.0 : 0.0;
      row[44] = swapped ? 1.0 : 0.0;
      log.rows.push_back(row);
    }

    if (t >= t_window) {
      ++win_count;
      r_sum += truth.r;
      win_xy.emplace_back(truth.x, truth.y);
      alt_max = std::max(alt_max, std::abs(truth.z - ref.z()));
      pos_max = std::max(pos_max, (st.pos - ref).norm());
      for (int i = 0; i < 4; ++i) f_sum[i] += applied.thrust(i + 1);
      if (swapped) {
        // Instantaneous primary axis of the true state vs the equilibrium one.
        const double wn = std::sqrt(truth.p * truth.p + truth.q * truth.q + truth.r * truth.r);
        if (wn > 1e-6) {
          axis_max = std::max(
              axis_max, std::hypot(truth.p / wn - eq.n[0], truth.q / wn - eq.n[1]));
        } else {
          axis_max = std::max(axis_max, 1.0);  // spin collapsed: not the equilibrium
        }
      }
    }

    for (int i = 0; i < m_sub; ++i) st = step_dcm(spec.plant, st, applied, dt_plant);
    if (!state_sane(st)) {
      log.crashed = true;
      log.crash_t = t + dt_inner;
      break;
    }
  }

  if (win_count > 0) {
    log.mean_r_final = r_sum / win_count;
    double cx = 0, cy = 0;
    for (const auto& [x, y] : win_xy) {
      cx += x;
      cy += y;
    }
    cx /= win_xy.size();
    cy /= win_xy.size();
    double dist = 0;
    for (const auto& [x, y] : win_xy) dist += std::hypot(x - cx, y - cy);
    log.orbit_radius = dist / win_xy.size();
    for (int i = 0; i < 4; ++i) log.mean_thrust_final[i] = f_sum[i] / win_count;
  }
  log.axis_err_final = axis_max;
  log.alt_err_final = alt_max;
  log.pos_err_final = pos_max;
  if (!log.crashed) {
    log.stable = log.failsafe_engaged ? (axis_max < 0.1 && alt_max < 0.5) : (pos_max < 0.5);
  }
  return log;
}

}  // namespace fsq

#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fsq/detect.hpp"
#include "fsq/equilibrium.hpp"
#include "fsq/errors.hpp"
#include "fsq/lqr.hpp"
#include "fsq/scenario.hpp"
#include "fsq/sim.hpp"
#include "fsq/sweep.hpp"
#include "fsq/sysid.hpp"

namespace fsq {

namespace {

std::vector<int> parse_failed(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      const int m = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument("junk");
      out.push_back(m);
    } catch (const std::exception&) {
      throw ConfigError("bad motor list '" + text + "' (want e.g. \"4\" or \"2,4\")");
    }
  }
  if (out.empty()) throw ConfigError("empty motor list");
  return out;
}

void print_equilibrium(const Equilibrium& eq, std::ostream& out) {
  out << std::setprecision(12);
  for (int i = 0; i < 4; ++i) out << "fbar" << i + 1 << "=" << eq.fbar[i] << "\n";
  for (int i = 0; i < 4; ++i) out << "wbar" << i + 1 << "=" << eq.wbar[i] << "\n";
  out << "pbar=" << eq.pbar << "\n"
      << "qbar=" << eq.qbar << "\n"
      << "rbar=" << eq.rbar << "\n"
      << "nx=" << eq.n[0] << "\n"
      << "ny=" << eq.n[1] << "\n"
      << "nz=" << eq.n[2] << "\n"
      << "Fbar=" << eq.Fbar << "\n"
      << "epsilon=" << eq.epsilon << "\n"
      << "Rps=" << eq.Rps << "\n";
  out << "fbar1,fbar2,fbar3,fbar4,wbar1,wbar2,wbar3,wbar4,pbar,qbar,rbar,"
         "nx,ny,nz,Fbar,epsilon,Rps\n";
  for (int i = 0; i < 4; ++i) out << eq.fbar[i] << ",";
  for (int i = 0; i < 4; ++i) out << eq.wbar[i] << ",";
  out << eq.pbar << "," << eq.qbar << "," << eq.rbar << "," << eq.n[0] << "," << eq.n[1]
      << "," << eq.n[2] << "," << eq.Fbar << "," << eq.epsilon << "," << eq.Rps << "\n";
}

int cmd_equilibrium(const std::string& params_arg, const std::string& failed_arg, double rho,
                    std::ostream& out) {
  QuadParams p = load_params_file(params_arg);
  FailureConfig fc;
  fc.failed = parse_failed(failed_arg);
  fc.rho = rho;
  fc.validate();
  print_equilibrium(solve_equilibrium(p, fc), out);
  return 0;
}

int cmd_lqr_gains(const std::string& params_arg, const std::string& failed_arg, double rho,
                  const std::string& weights_file, std::ostream& out) {
  QuadParams p = load_params_file(params_arg);
  FailureConfig fc;
  fc.failed = parse_failed(failed_arg);
  fc.rho = rho;
  fc.validate();
  const Equilibrium eq = solve_equilibrium(p, fc);

  ControllerConfig ctrl;
  apply_default_gains(ctrl, fc);
  if (!weights_file.empty()) apply_gains_file(ctrl, weights_file);

  const LinearModel lin = linearize_measured(p, fc, eq);
  const Eigen::MatrixXd K = lqr_gain(lin, ctrl.weights);
  out << std::setprecision(12);
  for (int i = 0; i < K.rows(); ++i) {
    for (int j = 0; j < K.cols(); ++j) out << (j ? "," : "") << K(i, j);
    out << "\n";
  }
  return 0;
}

void print_summary(const SimLog& log, std::ostream& out) {
  out << std::setprecision(12);
  out << "crashed=" << (log.crashed ? 1 : 0) << "\n";
  if (log.crashed) out << "crash_t=" << log.crash_t << "\n";
  out << "stable=" << (log.stable ? 1 : 0) << "\n"
      << "failsafe_engaged=" << (log.failsafe_engaged ? 1 : 0) << "\n"
      << "detect_time=" << log.detect_time << "\n"
      << "detected_motors=";
  bool first = true;
  for (int i = 0; i < 4; ++i) {
    if (log.detected_motors[i]) {
      out << (first ? "" : ",") << i + 1;
      first = false;
    }
  }
  if (first) out << "none";
  out << "\n"
      << "axis_err_final=" << log.axis_err_final << "\n"
      << "alt_err_final=" << log.alt_err_final << "\n"
      << "pos_err_final=" << log.pos_err_final << "\n"
      << "mean_r_final=" << log.mean_r_final << "\n"
      << "orbit_radius=" << log.orbit_radius << "\n";
}

int cmd_simulate(const std::string& scenario_file, const std::string& gains_file,
                 const std::string& out_csv, std::ostream& out) {
  ScenarioSpec spec = load_scenario_file(scenario_file);
  if (!gains_file.empty()) apply_gains_file(spec.ctrl, gains_file);
  const SimLog log = run_scenario(spec, /*with_rows=*/!out_csv.empty());
  if (!out_csv.empty()) {
    std::ofstream f(out_csv);
    if (!f) throw ConfigError("cannot open output file '" + out_csv + "'");
    write_csv(log, f);
  }
  print_summary(log, out);
  return log.crashed ? 1 : 0;
}

int cmd_sweep(const std::string& scenario_file, const std::string& kind,
              const std::string& var, int direction, const std::string& loop,
              const std::string& channel, std::ostream& out) {
  const ScenarioSpec spec = load_scenario_file(scenario_file);
  SweepResult res;
  if (kind == "initial") {
    res = sweep_initial_condition(spec, init_var_from_name(var), direction);
  } else if (kind == "frequency") {
    res = sweep_frequency(spec, loop);
  } else if (kind == "caps") {
    res = sweep_output_caps(spec, channel);
  } else {
    throw ConfigError("unknown sweep kind '" + kind + "' (initial|frequency|caps)");
  }
  out << std::setprecision(12) << "limit=" << res.limit << "\n"
      << "unbounded=" << (res.unbounded ? 1 : 0) << "\n"
      << "runs=" << res.runs << "\n";
  return 0;
}

int cmd_detect(const std::string& log_file, double window, std::ostream& out) {
  std::ifstream f(log_file);
  if (!f) throw ConfigError("cannot open log file '" + log_file + "'");
  const CsvTable t = read_csv(f);
  const int it = t.column("t");
  const int ip = t.column("p"), iq = t.column("q"), ir = t.column("r");
  const int iphi = t.column("phi"), itheta = t.column("theta");
  if (it < 0 || ip < 0 || iq < 0 || ir < 0 || iphi < 0 || itheta < 0)
    throw ConfigError("detect: log needs columns t,p,q,r,phi,theta");

  DetectorConfig cfg;
  cfg.window = window;
  FailureDetector det(cfg);
  out << std::setprecision(12);
  bool had = false;
  std::array<bool, 4> last{false, false, false, false};
  bool last_unknown = false;
  for (const auto& row : t.rows) {
    det.push(row[it], row[ip], row[iq], row[ir], row[iphi], row[itheta]);
    const FailureVerdict v = det.verdict();
    if (!v.any()) continue;
    if (had && v.motors == last && v.unknown == last_unknown) continue;
    had = true;
    last = v.motors;
    last_unknown = v.unknown;
    out << "t=" << row[it] << " verdict=";
    if (v.unknown) {
      out << "unknown";
    } else {
      bool first = true;
      for (int i = 0; i < 4; ++i)
        if (v.motors[i]) {
          out << (first ? "" : ",") << i + 1;
          first = false;
        }
    }
    out << " confidence=" << v.confidence << "\n";
  }
  if (!had) out << "verdict=none\n";
  return 0;
}

int cmd_sysid_thrust(const std::string& input, double Rw, const std::string& out_file,
                     std::ostream& out) {
  std::ifstream f(input);
  if (!f) throw ConfigError("cannot open input '" + input + "'");
  const ThrustFit fit = fit_thrust_curve(prop_samples_from_csv(read_csv(f)), Rw);
  out << std::setprecision(12) << "kf=" << fit.kf << "\nkt=" << fit.kt << "\nk=" << fit.k
      << "\n";
  if (!out_file.empty()) {
    std::ofstream g(out_file);
    if (!g) throw ConfigError("cannot open output file '" + out_file + "'");
    g << std::setprecision(12) << "kf=" << fit.kf << "\nkt=" << fit.kt << "\n";
  }
  return 0;
}

int cmd_sysid_drag(const std::string& input, const std::string& out_file, std::ostream& out) {
  std::ifstream f(input);
  if (!f) throw ConfigError("cannot open input '" + input + "'");
  const double gamma = fit_drag(drag_samples_from_csv(read_csv(f)));
  out << std::setprecision(12) << "gamma=" << gamma << "\n";
  if (!out_file.empty()) {
    std::ofstream g(out_file);
    if (!g) throw ConfigError("cannot open output file '" + out_file + "'");
    g << std::setprecision(12) << "gamma=" << gamma << "\n";
  }
  return 0;
}

int cmd_sysid_moi(double mass, double pivot, double period, const std::string& axis,
                  double g, const std::string& out_file, std::ostream& out) {
  PendulumTrial trial;
  trial.pivot_distance = pivot;
  trial.period = period;
  trial.axis = axis;
  const PendulumMoi moi = moi_from_pendulum(mass, trial, g);
  out << std::setprecision(12) << "J_pivot=" << moi.J_pivot << "\nJ_com=" << moi.J_com
      << "\n";
  if (!out_file.empty()) {
    if (axis != "xx" && axis != "yy" && axis != "zz")
      throw ConfigError("--out needs --axis xx|yy|zz to name the parameter");
    std::ofstream g2(out_file);
    if (!g2) throw ConfigError("cannot open output file '" + out_file + "'");
    g2 << std::setprecision(12) << "J" << axis << "=" << moi.J_com << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fail-safe quadcopter flight simulator and control toolbox"};
  app.require_subcommand(1);

  // equilibrium
  auto* eq_cmd = app.add_subcommand("equilibrium", "solve the spin trim for a failure set");
  std::string eq_params = "low_inertia", eq_failed = "4";
  double eq_rho = 0.5;
  eq_cmd->add_option("--params", eq_params, "parameter file or preset name");
  eq_cmd->add_option("--failed", eq_failed, "failed motors, e.g. 4 or 2,4");
  eq_cmd->add_option("--rho", eq_rho, "opposite-motor thrust ratio");

  // lqr-gains
  auto* lqr_cmd = app.add_subcommand("lqr-gains", "print the LQR gain matrix, row-major CSV");
  std::string lq_params = "low_inertia", lq_failed = "4", lq_weights;
  double lq_rho = 0.5;
  lqr_cmd->add_option("--params", lq_params, "parameter file or preset name");
  lqr_cmd->add_option("--failed", lq_failed, "failed motors");
  lqr_cmd->add_option("--rho", lq_rho, "opposite-motor thrust ratio");
  lqr_cmd->add_option("--weights", lq_weights, "gains file overriding the defaults");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run a closed-loop scenario");
  std::string sim_scn, sim_gains, sim_out;
  sim_cmd->add_option("--scenario", sim_scn, "scenario file")->required();
  sim_cmd->add_option("--gains", sim_gains, "gains file overlaid on the scenario");
  sim_cmd->add_option("--out", sim_out, "write the full log as CSV here");

  // sweep
  auto* sw_cmd = app.add_subcommand("sweep", "bisection limit studies on a scenario");
  std::string sw_scn, sw_kind = "initial", sw_var = "phi", sw_loop = "inner",
              sw_channel = "horizontal";
  int sw_dir = 1;
  sw_cmd->add_option("--scenario", sw_scn, "scenario file")->required();
  sw_cmd->add_option("--kind", sw_kind, "initial | frequency | caps");
  sw_cmd->add_option("--var", sw_var, "initial-condition variable (phi, theta, p, ...)");
  sw_cmd->add_option("--direction", sw_dir, "+1 or -1 probe direction");
  sw_cmd->add_option("--loop", sw_loop, "inner | outer (frequency sweeps)");
  sw_cmd->add_option("--channel", sw_channel, "horizontal | vertical (cap sweeps)");

  // detect
  auto* det_cmd = app.add_subcommand("detect", "replay a state log through the detector");
  std::string det_log;
  double det_window = 0.1;
  det_cmd->add_option("--log", det_log, "CSV with t,p,q,r,phi,theta columns")->required();
  det_cmd->add_option("--window", det_window, "lookback window [s]");

  // sysid
  auto* sy_cmd = app.add_subcommand("sysid", "measurement fits");
  sy_cmd->require_subcommand(1);
  auto* sy_thrust = sy_cmd->add_subcommand("fit-thrust", "kf/kt from a thrust-stand CSV");
  std::string syt_in, syt_out;
  double syt_rw = 0.12;
  sy_thrust->add_option("--input", syt_in, "CSV omega,thrust,voltage,current")->required();
  sy_thrust->add_option("--winding-resistance", syt_rw, "motor winding resistance [ohm]");
  sy_thrust->add_option("--out", syt_out, "write a parameter fragment here");
  auto* sy_drag = sy_cmd->add_subcommand("fit-drag", "gamma from steady spin points");
  std::string syd_in, syd_out;
  sy_drag->add_option("--input", syd_in, "CSV torque,omega_ss")->required();
  sy_drag->add_option("--out", syd_out, "write a parameter fragment here");
  auto* sy_moi = sy_cmd->add_subcommand("moi", "inertia from a pendulum swing");
  double sym_mass = 0, sym_pivot = 0, sym_period = 0, sym_g = 9.80665;
  std::string sym_axis, sym_out;
  sy_moi->add_option("--mass", sym_mass, "body mass [kg]")->required();
  sy_moi->add_option("--pivot-distance", sym_pivot, "COM-to-pivot distance [m]")->required();
  sy_moi->add_option("--period", sym_period, "swing period [s]")->required();
  sy_moi->add_option("--axis", sym_axis, "axis label xx|yy|zz");
  sy_moi->add_option("--g", sym_g, "gravity [m/s^2]");
  sy_moi->add_option("--out", sym_out, "write a parameter fragment here");

  std::vector<const char*> argv;
  argv.push_back("fsquad");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse((int)argv.size(), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (*eq_cmd) return cmd_equilibrium(eq_params, eq_failed, eq_rho, out);
    if (*lqr_cmd) return cmd_lqr_gains(lq_params, lq_failed, lq_rho, lq_weights, out);
    if (*sim_cmd) return cmd_simulate(sim_scn, sim_gains, sim_out, out);
    if (*sw_cmd) return cmd_sweep(sw_scn, sw_kind, sw_var, sw_dir, sw_loop, sw_channel, out);
    if (*det_cmd) return cmd_detect(det_log, det_window, out);
    if (*sy_cmd) {
      if (*sy_thrust) return cmd_sysid_thrust(syt_in, syt_rw, syt_out, out);
      if (*sy_drag) return cmd_sysid_drag(syd_in, syd_out, out);
      if (*sy_moi)
        return cmd_sysid_moi(sym_mass, sym_pivot, sym_period, sym_axis, sym_g, sym_out, out);
    }
    err << "no subcommand selected\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace fsq

#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "fsq/scenario.hpp"

namespace fsq {

// One row per inner tick; layout fixed by SimLog::columns().
using LogRow = std::array<double, 45>;

struct SimLog {
  static const std::vector<std::string>& columns();

  std::vector<LogRow> rows;  // empty when logging disabled

  // Run verdicts and steady-state measurements (final 20% window).
  bool crashed = false;
  double crash_t = -1;
  bool stable = false;
  bool failsafe_engaged = false;
  double detect_time = -1;              // first non-empty verdict, -1 if none
  bool detected = false;
  bool detected_correct = false;        // verdict set == injected set
  bool detect_unknown = false;
  std::array<bool, 4> detected_motors{false, false, false, false};
  double axis_err_final = 0;            // max ||(nx,ny)-(nbarx,nbary)|| over window
  double alt_err_final = 0;             // max |z - z_ref| over window
  double pos_err_final = 0;             // max ||pos - ref|| over window
  double mean_r_final = 0;              // mean body yaw rate over window
  double orbit_radius = 0;              // mean horizontal distance from window centroid
  std::array<double, 4> mean_thrust_final{0, 0, 0, 0};
  Equilibrium eq;                       // fail-safe trim in use (zeros if never engaged)
  double duration = 0;
};

void write_csv(const SimLog& log, std::ostream& out);

// Closed-loop multirate run. Plant integrates on the rotation-matrix state at
// >= 450 Hz substeps; controller ticks at f_inner; outer position shaping at
// f_outer; sensors on their own clocks. Crash (non-finite or ||state|| > 1e6)
// is an expected outcome for limit sweeps, reported in the log rather than
// thrown. with_rows=false skips row storage for sweep workloads.
SimLog run_scenario(const ScenarioSpec& spec, bool with_rows = true);

}  // namespace fsq

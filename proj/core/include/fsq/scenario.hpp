#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fsq/control.hpp"
#include "fsq/equilibrium.hpp"
#include "fsq/estimation.hpp"
#include "fsq/detect.hpp"
#include "fsq/params.hpp"

namespace fsq {

// Piecewise-constant position reference: the row with the largest t not
// exceeding the query time is active.
struct ReferenceRow {
  double t;
  double x, y, z;
};

Eigen::Vector3d ref_at(const std::vector<ReferenceRow>& refs, double t);

// Start-state description. For runs that begin at the fail-safe equilibrium
// the angles/rates are perturbations stacked on the trim state; for runs that
// begin in nominal hover they are absolute.
struct InitialSpec {
  double x = 0, y = 0, z = 0;
  double xd = 0, yd = 0, zd = 0;
  double phi = 0, theta = 0, psi = 0;
  double p = 0, q = 0, r = 0;
};

struct ScenarioSpec {
  QuadParams plant = preset_params("low_inertia");
  QuadParams model = preset_params("low_inertia");
  FailureConfig failure{};
  double failure_time = -1;  // < 0: already failed at t = 0, fail-safe engaged
  std::vector<ReferenceRow> refs;
  ControllerConfig ctrl;
  DetectorConfig detector;
  NoiseConfig noise = NoiseConfig::ideal();
  FilterConfig filters;
  SensorRates rates;
  std::uint64_t seed = 1;
  InitialSpec initial;
  double duration = 30;
  bool eq_from_plant = false;  // trim/gains from the true plant instead of the model
};

// Fills LQR weights, PID gains and outer-loop shaping with workable values
// for the given failure class; scenario files override individual keys.
void apply_default_gains(ControllerConfig& ctrl, const FailureConfig& failure);

// Sectioned key = value text; [references] rows are "t x y z". Unknown keys
// and malformed lines throw ConfigError.
ScenarioSpec load_scenario(std::istream& in);
ScenarioSpec load_scenario_file(const std::string& path);

// Standalone gains file: bare [controller]-section keys.
void apply_gains(ControllerConfig& ctrl, std::istream& in);
void apply_gains_file(ControllerConfig& ctrl, const std::string& path);

std::string format_scenario(const ScenarioSpec& s);

}  // namespace fsq

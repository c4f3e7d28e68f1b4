#pragma once

#include <functional>
#include <string>

#include "fsq/scenario.hpp"

namespace fsq {

// Which scalar of the scenario's initial state gets perturbed.
enum class InitVar { phi, theta, psi, p, q, r, x, y, z, xd, yd, zd };

InitVar init_var_from_name(const std::string& name);  // throws ConfigError
const char* to_string(InitVar v);

struct SweepResult {
  double limit = 0;        // boundary value of the swept quantity
  bool unbounded = false;  // still stable at the probe guard
  int runs = 0;            // simulations the search consumed
};

// Largest |offset| of one initial-state variable (direction +1 or -1) that
// still yields a stable run. Outward-doubling probes bracket the stability
// boundary, then bisection refines it; both bracket endpoints are actual
// runs, so monotonicity inside the bracket is verified, not assumed.
// Resolution: 0.1 deg (angles), 0.1 rad/s (rates), 0.1 m/s (velocities),
// 1 m (positions). Guards: 180 deg, 80 rad/s, 40 m/s, 100 m -> unbounded.
// Throws ConfigError when the unperturbed base scenario is itself unstable.
SweepResult sweep_initial_condition(const ScenarioSpec& base, InitVar var, int direction);

// Lowest stable rate (Hz, 1 Hz resolution) for one control loop, the other
// loop pinned at its baseline. loop: "inner" | "outer". The inner sweep
// moves the IMU rate with the loop (the IMU drives the inner tick).
SweepResult sweep_frequency(const ScenarioSpec& base, const std::string& loop);

// Largest output-cap value that keeps the scenario stable (caps above the
// boundary crash on the configured reference steps; caps below only slow
// tracking). channel: "horizontal" (outer xy accel cap) | "vertical"
// (outer z accel cap, or the altitude PID's symmetric cap when only two
// propellers survive). Resolution 0.1, guard 1000.
SweepResult sweep_output_caps(const ScenarioSpec& base, const std::string& channel);

// Run fn(0..n-1) on up to FAILSAFE_QUAD_THREADS worker threads (default:
// hardware concurrency). Exceptions from fn propagate to the caller.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace fsq

#include "fsq/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "fsq/errors.hpp"
#include "fsq/sim.hpp"

namespace fsq {

namespace {

constexpr double kDeg = M_PI / 180.0;

struct VarMeta {
  double res;    // bisection resolution
  double guard;  // probe ceiling -> unbounded
};

VarMeta meta_of(InitVar v) {
  switch (v) {
    case InitVar::phi:
    case InitVar::theta:
    case InitVar::psi:
      return {0.1 * kDeg, 180.0 * kDeg};
    case InitVar::p:
    case InitVar::q:
    case InitVar::r:
      return {0.1, 80.0};
    case InitVar::xd:
    case InitVar::yd:
    case InitVar::zd:
      return {0.1, 40.0};
    default:
      return {1.0, 100.0};
  }
}

double& init_field(InitialSpec& in, InitVar v) {
  switch (v) {
    case InitVar::phi: return in.phi;
    case InitVar::theta: return in.theta;
    case InitVar::psi: return in.psi;
    case InitVar::p: return in.p;
    case InitVar::q: return in.q;
    case InitVar::r: return in.r;
    case InitVar::x: return in.x;
    case InitVar::y: return in.y;
    case InitVar::z: return in.z;
    case InitVar::xd: return in.xd;
    case InitVar::yd: return in.yd;
    default: return in.zd;
  }
}

bool stable_run(const ScenarioSpec& spec, int& runs) {
  ++runs;
  const SimLog log = run_scenario(spec, /*with_rows=*/false);
  return !log.crashed && log.stable;
}

}  // namespace

InitVar init_var_from_name(const std::string& name) {
  static const std::pair<const char*, InitVar> table[] = {
      {"phi", InitVar::phi}, {"theta", InitVar::theta}, {"psi", InitVar::psi},
      {"p", InitVar::p},     {"q", InitVar::q},         {"r", InitVar::r},
      {"x", InitVar::x},     {"y", InitVar::y},         {"z", InitVar::z},
      {"xd", InitVar::xd},   {"yd", InitVar::yd},       {"zd", InitVar::zd},
  };
  for (const auto& [n, v] : table)
    if (name == n) return v;
  throw ConfigError("unknown initial-condition variable '" + name + "'");
}

const char* to_string(InitVar v) {
  switch (v) {
    case InitVar::phi: return "phi";
    case InitVar::theta: return "theta";
    case InitVar::psi: return "psi";
    case InitVar::p: return "p";
    case InitVar::q: return "q";
    case InitVar::r: return "r";
    case InitVar::x: return "x";
    case InitVar::y: return "y";
    case InitVar::z: return "z";
    case InitVar::xd: return "xd";
    case InitVar::yd: return "yd";
    default: return "zd";
  }
}

SweepResult sweep_initial_condition(const ScenarioSpec& base, InitVar var, int direction) {
  if (direction != 1 && direction != -1)
    throw ConfigError("sweep_initial_condition: direction must be +1 or -1");
  const VarMeta m = meta_of(var);
  SweepResult out;

  auto stable_at = [&](double delta) {
    ScenarioSpec probe = base;
    init_field(probe.initial, var) += direction * delta;
    return stable_run(probe, out.runs);
  };

  if (!stable_at(0.0))
    throw ConfigError("sweep_initial_condition: base scenario is unstable");

  // Outward doubling until a crash brackets the boundary.
  double lo = 0.0;             // stable
  double hi = -1.0;            // first crashed probe, if any
  for (double d = 8.0 * m.res; d <= m.guard; d *= 2.0) {
    const double probe = std::min(d, m.guard);
    if (stable_at(probe)) {
      lo = probe;
      if (probe >= m.guard) {
        out.limit = direction * m.guard;
        out.unbounded = true;
        return out;
      }
    } else {
      hi = probe;
      break;
    }
    if (probe >= m.guard) break;
  }
  if (hi < 0.0) {
    if (lo < m.guard && !stable_at(m.guard)) {
      hi = m.guard;
    } else {
      out.limit = direction * m.guard;
      out.unbounded = true;
      return out;
    }
  }

  while (hi - lo > m.res) {
    const double mid = 0.5 * (lo + hi);
    if (stable_at(mid))
      lo = mid;
    else
      hi = mid;
  }
  out.limit = direction * lo;
  return out;
}

SweepResult sweep_frequency(const ScenarioSpec& base, const std::string& loop) {
  const bool inner = loop == "inner";
  if (!inner && loop != "outer")
    throw ConfigError("sweep_frequency: loop must be 'inner' or 'outer'");
  SweepResult out;

  auto stable_at = [&](int hz) {
    ScenarioSpec probe = base;
    if (inner) {
      probe.ctrl.f_inner = hz;
      probe.rates.imu_hz = hz;
    } else {
      probe.ctrl.f_outer = hz;
    }
    return stable_run(probe, out.runs);
  };

  const int base_hz = (int)std::lround(inner ? base.ctrl.f_inner : base.ctrl.f_outer);
  if (!stable_at(base_hz)) throw ConfigError("sweep_frequency: base scenario is unstable");

  // Halving probes down from the baseline until a crash.
  int hi = base_hz;  // stable
  int lo = 0;        // crashed (0 = sentinel, never run)
  for (int f = base_hz / 2; f >= 1; f /= 2) {
    if (stable_at(f)) {
      hi = f;
      if (f == 1) {
        out.limit = 1;
        out.unbounded = true;
        return out;
      }
    } else {
      lo = f;
      break;
    }
  }
  if (lo == 0) {
    if (hi > 1 && !stable_at(1)) {
      lo = 1;
    } else {
      out.limit = 1;
      out.unbounded = true;
      return out;
    }
  }

  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (stable_at(mid))
      hi = mid;
    else
      lo = mid;
  }
  out.limit = hi;
  return out;
}

SweepResult sweep_output_caps(const ScenarioSpec& base, const std::string& channel) {
  const bool horizontal = channel == "horizontal";
  if (!horizontal && channel != "vertical")
    throw ConfigError("sweep_output_caps: channel must be 'horizontal' or 'vertical'");
  const bool pid_cap = !horizontal && !base.failure.is_single();
  const double res = 0.1, guard = 1000.0;
  SweepResult out;

  auto stable_at = [&](double cap) {
    ScenarioSpec probe = base;
    if (horizontal) {
      probe.ctrl.outer.cap_xy = cap;
    } else if (pid_cap) {
      probe.ctrl.altitude_pid.out_max = cap;
      probe.ctrl.altitude_pid.out_min = -cap;
    } else {
      probe.ctrl.outer.cap_z = cap;
    }
    return stable_run(probe, out.runs);
  };

  double start = horizontal ? base.ctrl.outer.cap_xy
                            : (pid_cap ? base.ctrl.altitude_pid.out_max : base.ctrl.outer.cap_z);
  start = std::min(std::max(start, res), guard);
  if (!stable_at(start)) throw ConfigError("sweep_output_caps: base scenario is unstable");

  double lo = start;  // stable
  double hi = -1.0;   // crashed
  for (double c = start * 2.0; c <= guard; c *= 2.0) {
    if (stable_at(c)) {
      lo = c;
    } else {
      hi = c;
      break;
    }
  }
  if (hi < 0.0) {
    if (lo < guard && !stable_at(guard)) {
      hi = guard;
    } else {
      out.limit = guard;
      out.unbounded = true;
      return out;
    }
  }

  while (hi - lo > res) {
    const double mid = 0.5 * (lo + hi);
    if (stable_at(mid))
      lo = mid;
    else
      hi = mid;
  }
  out.limit = lo;
  return out;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  int threads = (int)std::thread::hardware_concurrency();
  if (const char* env = std::getenv("FAILSAFE_QUAD_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) threads = t;
  }
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fsq

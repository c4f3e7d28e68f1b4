#include <doctest.h>

#include <atomic>
#include <stdexcept>
#include <string>

#include "fsq/errors.hpp"
#include "fsq/scenario.hpp"
#include "fsq/sweep.hpp"

using namespace fsq;

namespace {

ScenarioSpec pair_base(double duration) {
  ScenarioSpec s;
  s.failure.failed = {2, 4};
  apply_default_gains(s.ctrl, s.failure);
  s.initial.z = 2;
  s.refs = {{0, 0, 0, 2}};
  s.duration = duration;
  return s;
}

}  // namespace

TEST_CASE("init-var names round trip") {
  const char* names[] = {"phi", "theta", "psi", "p", "q", "r",
                         "x",   "y",     "z",   "xd", "yd", "zd"};
  for (const char* n : names) CHECK(std::string(to_string(init_var_from_name(n))) == n);
  CHECK_THROWS_AS(init_var_from_name("roll"), ConfigError);
}

TEST_CASE("parallel_for covers the range once and propagates exceptions") {
  std::atomic<long> sum{0};
  std::atomic<int> calls{0};
  parallel_for(100, [&](int i) {
    sum += i;
    ++calls;
  });
  CHECK(sum == 4950);
  CHECK(calls == 100);

  parallel_for(0, [&](int) { throw std::runtime_error("never called"); });

  CHECK_THROWS_AS(parallel_for(8,
                               [&](int i) {
                                 if (i == 5) throw DomainError("boom");
                               }),
                  DomainError);
}

TEST_CASE("initial-condition sweep brackets a roll-angle boundary") {
  const SweepResult res = sweep_initial_condition(pair_base(5.0), InitVar::phi, +1);
  CHECK(res.runs >= 3);
  // two propellers tolerate large tilts; anything else means the probe logic
  // broke, not that the vehicle got fragile
  if (!res.unbounded) CHECK(res.limit > 0.5);
  if (res.unbounded) CHECK(res.limit > 3.0);  // guard value reported
}

TEST_CASE("sweep refuses an unstable base scenario") {
  ScenarioSpec s = pair_base(5.0);
  s.ctrl.f_max = 2.0;  // cannot lift the airframe at all
  CHECK_THROWS_AS(sweep_initial_condition(s, InitVar::phi, +1), ConfigError);
}

TEST_CASE("frequency sweep finds a minimum stable outer rate") {
  const SweepResult res = sweep_frequency(pair_base(4.0), "outer");
  CHECK(res.runs >= 2);
  CHECK(!res.unbounded);
  CHECK(res.limit >= 1.0);
  CHECK(res.limit <= 45.0);  // the baseline is stable, so the boundary is below it

  CHECK_THROWS_AS(sweep_frequency(pair_base(4.0), "sideways"), ConfigError);
}

TEST_CASE("cap sweep answers on the configured channel only") {
  ScenarioSpec s = pair_base(5.0);
  s.refs = {{0, 0, 0, 2}, {1.0, 1.0, 0, 2}};  // a step to make big caps matter
  const SweepResult res = sweep_output_caps(s, "horizontal");
  CHECK(res.runs >= 1);
  if (!res.unbounded) CHECK(res.limit > 0.0);

  CHECK_THROWS_AS(sweep_output_caps(s, "diagonal"), ConfigError);
}

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "fsq/errors.hpp"
#include "fsq/estimation.hpp"
#include "fsq/sysid.hpp"

using namespace fsq;

TEST_CASE("pendulum swing gives the frozen inertia values") {
  PendulumTrial trial;
  trial.pivot_distance = 0.30;
  trial.period = 1.25;
  trial.axis = "xx";
  const PendulumMoi moi = moi_from_pendulum(1.439, trial);
  CHECK(moi.J_pivot == doctest::Approx(0.16755716880816374).epsilon(1e-12));
  CHECK(moi.J_com == doctest::Approx(0.03804716880816372).epsilon(1e-12));

  // a period too short for the geometry has no physical solution
  trial.period = 0.5;
  CHECK_THROWS_AS(moi_from_pendulum(1.439, trial), DomainError);
}

TEST_CASE("prop inertia is the sum of two spinning disks") {
  // 1/2 m r^2 each: 0.5*0.03*0.016^2 + 0.5*0.008*0.0635^2
  const double want = 0.5 * 0.03 * 0.016 * 0.016 + 0.5 * 0.008 * 0.0635 * 0.0635;
  CHECK(prop_moi(0.03, 0.016, 0.008, 0.0635) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("thrust-stand fit recovers planted coefficients exactly") {
  // rows generated on the model: f = kf w^2, tau = kt w^2,
  // V = (tau*w + I^2 Rw) / I with kf=1.2e-5, kt=1.6e-7, Rw=0.12
  const std::vector<PropSample> samples = {
      {400.0, 1.9200000000000002, 5.359999999999999, 2.0},
      {600.0, 4.32, 11.88, 3.0},
      {800.0, 7.680000000000001, 18.744444444444444, 4.5},
      {1000.0, 12.0, 27.386666666666667, 6.0},
  };
  const ThrustFit fit = fit_thrust_curve(samples, 0.12);
  CHECK(fit.kf == doctest::Approx(1.2e-5).epsilon(1e-12));
  CHECK(fit.kt == doctest::Approx(1.6e-7).epsilon(1e-12));
  CHECK(fit.k == doctest::Approx(75.0).epsilon(1e-12));

  CHECK_THROWS_AS(fit_thrust_curve({samples[0], samples[1]}, 0.12), DomainError);
}

TEST_CASE("thrust fit degrades gracefully under measurement noise") {
  // 1% multiplicative noise on thrust and current, deterministic draws
  std::vector<PropSample> noisy;
  int k = 0;
  for (double w = 300; w <= 1100; w += 100) {
    const double f = 1.2e-5 * w * w;
    const double tau = 1.6e-7 * w * w;
    const double I = 2.0 + 0.004 * (w - 300);
    const double V = (tau * w + I * I * 0.12) / I;
    PropSample s;
    s.omega = w;
    s.thrust = f * (1.0 + 0.01 * hash_gauss(5, 0, k++));
    s.voltage = V;
    s.current = I * (1.0 + 0.01 * hash_gauss(5, 1, k++));
    noisy.push_back(s);
  }
  const ThrustFit fit = fit_thrust_curve(noisy, 0.12);
  CHECK(std::abs(fit.kf - 1.2e-5) / 1.2e-5 < 0.02);
  CHECK(std::abs(fit.kt - 1.6e-7) / 1.6e-7 < 0.02);
}

TEST_CASE("drag fit recovers the yaw drag coefficient exactly") {
  // tau = gamma w^2 with the racer airframe's coefficient
  const double gamma = 0.000184199;
  std::vector<DragSample> rows;
  for (double w : {10.0, 20.0, 30.0, 40.0, 50.0}) rows.push_back({gamma * w * w, w});
  CHECK(fit_drag(rows) == doctest::Approx(gamma).epsilon(1e-12));

  CHECK_THROWS_AS(fit_drag({rows[0], rows[1]}), DomainError);
  // three samples but only one distinct rate: singular
  CHECK_THROWS_AS(fit_drag({{0.1, 20.0}, {0.1, 20.0}, {0.1, 20.0}}), DomainError);
}

TEST_CASE("csv reader parses numeric tables and rejects garbage") {
  std::istringstream ok("a,b,c\n1,2,3\n4.5,-6,7e-2\n");
  const CsvTable t = read_csv(ok);
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][2] == doctest::Approx(0.07));
  CHECK(t.column("b") == 1);
  CHECK(t.column("nope") == -1);

  std::istringstream ragged("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(ragged), ConfigError);
  std::istringstream text("a,b\n1,x\n");
  CHECK_THROWS_AS(read_csv(text), ConfigError);
}

TEST_CASE("sample extraction wants its named columns") {
  std::istringstream good("omega,thrust,voltage,current\n400,1.92,5.36,2\n");
  const auto rows = prop_samples_from_csv(read_csv(good));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].omega == 400.0);
  CHECK(rows[0].current == 2.0);

  std::istringstream missing("omega,thrust\n400,1.92\n");
  CHECK_THROWS_AS(prop_samples_from_csv(read_csv(missing)), ConfigError);

  std::istringstream drag_ok("torque,omega_ss\n0.0184199,10\n");
  const auto drows = drag_samples_from_csv(read_csv(drag_ok));
  REQUIRE(drows.size() == 1);
  CHECK(drows[0].total_torque == doctest::Approx(0.0184199));

  std::istringstream drag_bad("torque\n0.1\n");
  CHECK_THROWS_AS(drag_samples_from_csv(read_csv(drag_bad)), ConfigError);
}

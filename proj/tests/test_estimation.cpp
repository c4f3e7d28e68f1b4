#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "fsq/estimation.hpp"
#include "fsq/state.hpp"

using namespace fsq;

TEST_CASE("ema blends with the documented weight on the new sample") {
  CHECK(ema(0.1, 0.3, 0.5) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(ema(0.1, 0.3, 1.0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(ema(0.1, 0.3, 0.0) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("complementary filter matches the frozen step") {
  const double dt = 1.0 / 450.0, tau = 32.0 / 450.0;
  CHECK(complementary(0.10, 0.5, 0.12, dt, tau) ==
        doctest::Approx(0.10168350168350168).epsilon(1e-14));
  // tau -> 0 trusts the absolute channel completely
  CHECK(complementary(0.10, 0.5, 0.12, dt, 0.0) == doctest::Approx(0.12).epsilon(1e-14));
  // integration path alone when the absolute weight vanishes
  const double big_tau = 1e12;
  CHECK(complementary(0.10, 0.5, 0.12, dt, big_tau) ==
        doctest::Approx(0.10 + 0.5 * dt).epsilon(1e-6));
}

TEST_CASE("angle-domain complementary filter survives the wrap seam") {
  const double dt = 1.0 / 450.0, tau = 32.0 / 450.0;

  // away from the seam it agrees with the linear blend up to the chord error
  // of blending on the unit circle (second order in the angle gap, ~4e-9 here)
  const double lin = complementary(0.4, 0.2, 0.41, dt, tau);
  CHECK(std::abs(complementary_angle(0.4, 0.2, 0.41, dt, tau) - lin) < 1e-8);

  // prev just below +pi, absolute just above -pi: the blend must not tear
  const double prev = M_PI - 0.01;
  const double absolute = -M_PI + 0.01;
  const double out = complementary_angle(prev, 3.0, absolute, dt, tau);
  const double dist_to_seam = std::min(std::abs(out - M_PI), std::abs(out + M_PI));
  CHECK(dist_to_seam < 0.05);  // stayed near the seam instead of sweeping to 0

  // result is always a principal-branch angle
  CHECK(out <= M_PI + 1e-12);
  CHECK(out >= -M_PI - 1e-12);
}

TEST_CASE("hash noise is deterministic and roughly standard normal") {
  CHECK(hash_gauss(7, 3, 100) == hash_gauss(7, 3, 100));
  CHECK(hash_gauss(7, 3, 100) != hash_gauss(7, 3, 101));
  CHECK(hash_gauss(7, 3, 100) != hash_gauss(8, 3, 100));
  CHECK(hash_gauss(7, 4, 100) != hash_gauss(7, 3, 100));

  const int n = 20000;
  double sum = 0, sum2 = 0;
  int within1 = 0;
  for (int k = 0; k < n; ++k) {
    const double v = hash_gauss(42, 1, (std::uint64_t)k);
    sum += v;
    sum2 += v * v;
    if (std::abs(v) < 1.0) ++within1;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.025);           // ~3.5 sigma of the mean estimator
  CHECK(var == doctest::Approx(1.0).epsilon(0.04));
  CHECK(std::abs(within1 / (double)n - 0.6827) < 0.015);
}

TEST_CASE("sampler holds channels between their own sample times") {
  SensorRates rates;  // 450 / 10 / 20 Hz
  SensorSampler sampler(NoiseConfig::ideal(), rates, 1);

  RigidState truth;
  const double dt = 1.0 / 450.0;
  int gps_updates = 0, ultra_updates = 0;
  double held_x = -1, held_z = -1;
  for (int k = 0; k < 450; ++k) {  // one second
    truth.x = 0.01 * k;
    truth.z = 2.0 + 0.005 * k;
    truth.p = 0.1 * k;
    const SensorFrame f = sampler.sample(truth, k * dt);
    CHECK(f.fresh_imu);  // IMU runs at the call rate here
    CHECK(f.p == doctest::Approx(truth.p));
    if (f.fresh_gps) {
      ++gps_updates;
      held_x = f.x;
    } else {
      CHECK(f.x == doctest::Approx(held_x));  // held between GPS fixes
    }
    if (f.fresh_ultra) {
      ++ultra_updates;
      held_z = f.z;
    } else {
      CHECK(f.z == doctest::Approx(held_z));
    }
  }
  CHECK(gps_updates >= 9);
  CHECK(gps_updates <= 11);
  CHECK(ultra_updates >= 19);
  CHECK(ultra_updates <= 21);
}

TEST_CASE("sampler replays bit-identically for a fixed seed") {
  NoiseConfig noise;  // default nonzero levels
  SensorRates rates;
  SensorSampler a(noise, rates, 99), b(noise, rates, 99), c(noise, rates, 100);
  RigidState truth;
  truth.z = 2;
  bool seeds_differ = false;
  for (int k = 0; k < 200; ++k) {
    const double t = k / 450.0;
    truth.x = std::sin(0.01 * k);
    const SensorFrame fa = a.sample(truth, t);
    const SensorFrame fb = b.sample(truth, t);
    const SensorFrame fc = c.sample(truth, t);
    CHECK(fa.p == fb.p);
    CHECK(fa.x == fb.x);
    CHECK(fa.z == fb.z);
    CHECK(fa.phi == fb.phi);
    if (fa.p != fc.p || fa.x != fc.x) seeds_differ = true;
  }
  CHECK(seeds_differ);
}

TEST_CASE("estimator tracks a steady spin including the yaw wrap") {
  FilterConfig cfg;
  StateEstimator est(cfg);
  SensorSampler sampler(NoiseConfig::ideal(), SensorRates{}, 1);

  RigidState truth;
  truth.z = 2;
  truth.r = 5.0;  // steady yaw spin, wraps psi every ~1.26 s
  const double dt = 1.0 / 450.0;
  double worst_psi_err = 0;
  for (int k = 0; k < 450 * 3; ++k) {
    const double t = k * dt;
    truth.psi = std::remainder(5.0 * t, 2 * M_PI);
    const SensorFrame f = sampler.sample(truth, t);
    const RigidState& e = est.update(f, dt);
    if (t > 0.5) {
      const double err = std::abs(std::remainder(e.psi - truth.psi, 2 * M_PI));
      worst_psi_err = std::max(worst_psi_err, err);
    }
  }
  CHECK(worst_psi_err < 0.02);  // no 2*pi tears while spinning through the seam
}

TEST_CASE("estimator recovers climb rate from differentiated altitude") {
  FilterConfig cfg;
  StateEstimator est(cfg);
  SensorSampler sampler(NoiseConfig::ideal(), SensorRates{}, 1);

  RigidState truth;
  const double zdot = 0.8;
  const double dt = 1.0 / 450.0;
  RigidState e;
  for (int k = 0; k < 450 * 2; ++k) {
    const double t = k * dt;
    truth.z = 1.0 + zdot * t;
    truth.zd = zdot;
    e = est.update(sampler.sample(truth, t), dt);
  }
  CHECK(e.zd == doctest::Approx(zdot).epsilon(0.05));
  CHECK(e.z == doctest::Approx(truth.z).epsilon(0.02));
}

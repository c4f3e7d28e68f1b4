#include <doctest.h>

#include <cmath>

#include "fsq/dynamics.hpp"
#include "fsq/equilibrium.hpp"
#include "fsq/errors.hpp"
#include "fsq/params.hpp"

using namespace fsq;

namespace {

FailureConfig failed(std::vector<int> motors, double rho = 0.5) {
  FailureConfig fc;
  fc.failed = std::move(motors);
  fc.rho = rho;
  return fc;
}

double max_residual(const QuadParams& p, const FailureConfig& fc, const Equilibrium& eq) {
  const auto r = equilibrium_residual(p, fc, eq);
  return std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
}

}  // namespace

TEST_CASE("failure config validation") {
  CHECK_NOTHROW(failed({4}).validate());
  CHECK_NOTHROW(failed({1, 3}).validate());
  CHECK_NOTHROW(failed({2, 4}).validate());
  CHECK_THROWS_AS(failed({}).validate(), ConfigError);
  CHECK_THROWS_AS(failed({5}).validate(), ConfigError);
  CHECK_THROWS_AS(failed({0}).validate(), ConfigError);
  CHECK_THROWS_AS(failed({1, 2}).validate(), ConfigError);      // adjacent pair
  CHECK_THROWS_AS(failed({1, 2, 3}).validate(), ConfigError);   // triple
  CHECK_THROWS_AS(failed({4}, -0.1).validate(), ConfigError);
  CHECK_THROWS_AS(failed({4}, 1.5).validate(), ConfigError);

  const auto m = failed({2, 4}).mask();
  CHECK(!m[0]);
  CHECK(m[1]);
  CHECK(!m[2]);
  CHECK(m[3]);
}

TEST_CASE("primary axis normalizes and rejects zero rates") {
  // frozen: (0, 1.5078, 43.393) normalized
  const auto n = primary_axis(0.0, 1.5078, 43.393);
  CHECK(n[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(n[1] == doctest::Approx(0.03472658195952642).epsilon(1e-12));
  CHECK(n[2] == doctest::Approx(0.9993968503579587).epsilon(1e-12));
  CHECK(n[0] * n[0] + n[1] * n[1] + n[2] * n[2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(primary_axis(0, 0, 0), DomainError);

  // spin about -z points the axis down
  CHECK(primary_axis(0, 0, -5.0)[2] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("orbit radius closed form") {
  const double g = 9.80665;
  CHECK(orbit_radius(1.0, 40.0, g) == doctest::Approx(0.0).epsilon(1e-15));
  // frozen example
  const double wn = std::sqrt(2.07846 * 2.07846 + 43.39316 * 43.39316);
  CHECK(orbit_radius(0.99885484, wn, g) ==
        doctest::Approx(2.4888814784159656e-4).epsilon(1e-12));
  CHECK_THROWS_AS(orbit_radius(0.0, 40.0, g), DomainError);
  CHECK_THROWS_AS(orbit_radius(-0.5, 40.0, g), DomainError);
  CHECK_THROWS_AS(orbit_radius(0.9, 0.0, g), DomainError);
}

TEST_CASE("opposing-pair trim matches the closed form exactly") {
  // frozen: fbar = Mg/2, wbar = sqrt(fbar/kf), rbar = sqrt(2 kt wbar^2 / gamma)
  const QuadParams lo = preset_params("low_inertia");
  const Equilibrium eq = solve_equilibrium(lo, failed({2, 4}));
  CHECK(eq.fbar[0] == doctest::Approx(7.055884675).epsilon(1e-12));
  CHECK(eq.fbar[2] == doctest::Approx(7.055884675).epsilon(1e-12));
  CHECK(eq.fbar[1] == 0.0);
  CHECK(eq.fbar[3] == 0.0);
  CHECK(eq.wbar[0] == doctest::Approx(803.946713764066).epsilon(1e-12));
  CHECK(eq.pbar == 0.0);
  CHECK(eq.qbar == 0.0);
  CHECK(eq.rbar == doctest::Approx(32.02075835908391).epsilon(1e-12));
  CHECK(eq.n[0] == 0.0);
  CHECK(eq.n[1] == 0.0);
  CHECK(eq.n[2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eq.Fbar == doctest::Approx(14.11176935).epsilon(1e-12));
  CHECK(eq.epsilon == doctest::Approx(0.013383479102011205).epsilon(1e-12));
  CHECK(eq.Rps == doctest::Approx(0.0).epsilon(1e-15));  // axis is vertical

  const QuadParams hi = preset_params("high_inertia");
  const Equilibrium eh = solve_equilibrium(hi, failed({1, 3}));
  CHECK(eh.fbar[1] == doctest::Approx(9.747810099999999).epsilon(1e-12));
  CHECK(eh.wbar[1] == doctest::Approx(944.9417928550405).epsilon(1e-12));
  // survivors {2,4} spin the craft negative; {1,3} survivors spin it positive
  CHECK(eh.rbar == doctest::Approx(-10.048690984310168).epsilon(1e-12));
  CHECK(eh.Fbar == doctest::Approx(19.4956202).epsilon(1e-12));
}

TEST_CASE("doubling the yaw drag scales the pair spin rate by 1/sqrt(2)") {
  QuadParams p = preset_params("low_inertia");
  const double r1 = solve_equilibrium(p, failed({2, 4})).rbar;
  p.gamma *= 2.0;
  const double r2 = solve_equilibrium(p, failed({2, 4})).rbar;
  CHECK(r1 == doctest::Approx(32.02075835908391).epsilon(1e-12));
  CHECK(r2 == doctest::Approx(22.64209537444406).epsilon(1e-12));
  CHECK(r1 / r2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("single-failure trim satisfies the torque balance on both airframes") {
  for (const char* name : {"low_inertia", "high_inertia"}) {
    const QuadParams p = preset_params(name);
    for (int m = 1; m <= 4; ++m) {
      CAPTURE(name);
      CAPTURE(m);
      const FailureConfig fc = failed({m});
      const Equilibrium eq = solve_equilibrium(p, fc);
      CHECK(max_residual(p, fc, eq) < 1e-9);

      // lift balance through the tilted axis: Fbar * |nz| = M g
      CHECK(eq.Fbar * std::abs(eq.n[2]) == doctest::Approx(p.M * p.g).epsilon(1e-9));

      // the opposite survivor carries rho times the paired thrust
      const int opp = ((m - 1 + 2) % 4) + 1;
      const int pair_a = (m % 4) + 1;  // a neighbour of the failed motor
      CHECK(eq.fbar[m - 1] == 0.0);
      CHECK(eq.fbar[opp - 1] ==
            doctest::Approx(0.5 * eq.fbar[pair_a - 1]).epsilon(1e-9));

      // axis is unit and tilted away from vertical
      const double nn =
          eq.n[0] * eq.n[0] + eq.n[1] * eq.n[1] + eq.n[2] * eq.n[2];
      CHECK(nn == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(eq.n[2]) < 1.0);
      CHECK(eq.Rps > 0.0);

      // motors 1 or 3 out leave a -z reaction surplus: spin goes negative
      if (m == 1 || m == 3) {
        CHECK(eq.rbar < 0.0);
        CHECK(eq.n[2] < 0.0);
      } else {
        CHECK(eq.rbar > 0.0);
        CHECK(eq.n[2] > 0.0);
      }
    }
  }
}

TEST_CASE("trim is continuous in rho") {
  const QuadParams p = preset_params("low_inertia");
  const Equilibrium a = solve_equilibrium(p, failed({4}, 0.5));
  const Equilibrium b = solve_equilibrium(p, failed({4}, 0.5 + 1e-6));
  CHECK(std::abs(a.rbar - b.rbar) < 1e-3);
  CHECK(std::abs(a.fbar[0] - b.fbar[0]) < 1e-3);

  // rho = 0 degenerates to the opposing-pair closed form
  const Equilibrium z = solve_equilibrium(p, failed({4}, 0.0));
  const Equilibrium pair = solve_equilibrium(p, failed({2, 4}));
  CHECK(z.fbar[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(z.rbar) == doctest::Approx(pair.rbar).epsilon(1e-6));
}

TEST_CASE("pair trim residual is tiny too") {
  for (const char* name : {"low_inertia", "high_inertia"}) {
    const QuadParams p = preset_params(name);
    for (auto motors : {std::vector<int>{1, 3}, std::vector<int>{2, 4}}) {
      const FailureConfig fc = failed(motors);
      CHECK(max_residual(p, fc, solve_equilibrium(p, fc)) < 1e-9);
    }
  }
}

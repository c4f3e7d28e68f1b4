#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fsq/equilibrium.hpp"
#include "fsq/lqr.hpp"
#include "fsq/params.hpp"
#include "fsq/scenario.hpp"

using namespace fsq;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// grab "key=value" from the summary-style output
double value_of(const std::string& text, const std::string& key) {
  const std::string needle = key + "=";
  size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    if (pos == 0 || text[pos - 1] == '\n') {
      const size_t start = pos + needle.size();
      return std::stod(text.substr(start));
    }
    ++pos;
  }
  REQUIRE_MESSAGE(false, ("missing key " + key).c_str());
  return 0;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("fsq_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string file(const std::string& name, const std::string& content) const {
    const fs::path p = path / name;
    std::ofstream f(p);
    f << content;
    return p.string();
  }
  std::string name(const std::string& n) const { return (path / n).string(); }
};

}  // namespace

TEST_CASE("cli usage errors exit 2, help exits 0") {
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"no-such-command"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"simulate"}).code == 2);  // missing required --scenario
  CHECK(cli({"equilibrium", "--failed", "1,2"}).code == 2);
  CHECK(cli({"equilibrium", "--failed", "donkey"}).code == 2);
  CHECK(cli({"equilibrium", "--params", "no_such_preset"}).code == 2);
  CHECK(cli({"simulate", "--scenario", "/nonexistent.scn"}).code == 2);
}

TEST_CASE("cli equilibrium prints the solver's trim to high precision") {
  const CliRun r = cli({"equilibrium", "--params", "low_inertia", "--failed", "2,4"});
  REQUIRE(r.code == 0);
  FailureConfig fc;
  fc.failed = {2, 4};
  const Equilibrium eq = solve_equilibrium(preset_params("low_inertia"), fc);
  CHECK(value_of(r.out, "fbar1") == doctest::Approx(eq.fbar[0]).epsilon(1e-10));
  CHECK(value_of(r.out, "wbar1") == doctest::Approx(eq.wbar[0]).epsilon(1e-10));
  CHECK(value_of(r.out, "rbar") == doctest::Approx(eq.rbar).epsilon(1e-10));
  CHECK(value_of(r.out, "Fbar") == doctest::Approx(eq.Fbar).epsilon(1e-10));
  CHECK(value_of(r.out, "epsilon") == doctest::Approx(eq.epsilon).epsilon(1e-10));
}

TEST_CASE("cli lqr-gains emits the same matrix the library computes") {
  const CliRun r = cli({"lqr-gains", "--failed", "4", "--rho", "0.5"});
  REQUIRE(r.code == 0);

  const QuadParams p = preset_params("low_inertia");
  FailureConfig fc;
  fc.failed = {4};
  const Equilibrium eq = solve_equilibrium(p, fc);
  ControllerConfig ctrl;
  apply_default_gains(ctrl, fc);
  const Eigen::MatrixXd K = lqr_gain(linearize_measured(p, fc, eq), ctrl.weights);

  std::istringstream lines(r.out);
  std::string line;
  int row = 0;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    int coli = 0;
    while (std::getline(cells, cell, ',')) {
      REQUIRE(row < K.rows());
      REQUIRE(coli < K.cols());
      CHECK(std::stod(cell) == doctest::Approx(K(row, coli)).epsilon(1e-9));
      ++coli;
    }
    CHECK(coli == K.cols());
    ++row;
  }
  CHECK(row == K.rows());
}

TEST_CASE("cli simulate reports a summary and writes the log") {
  TempDir tmp;
  const std::string scn = tmp.file("hover.scn", R"(
[failure]
motors = 2,4
[initial]
z = 2
[references]
0 0 0 2
[run]
duration = 4
)");
  const std::string csv = tmp.name("run.csv");
  const CliRun r = cli({"simulate", "--scenario", scn, "--out", csv});
  CHECK(r.code == 0);
  CHECK(value_of(r.out, "crashed") == 0);
  CHECK(value_of(r.out, "stable") == 1);
  CHECK(value_of(r.out, "failsafe_engaged") == 1);
  CHECK(value_of(r.out, "mean_r_final") == doctest::Approx(32.02).epsilon(0.01));

  std::ifstream f(csv);
  REQUIRE(f.good());
  std::string header;
  std::getline(f, header);
  CHECK(header.rfind("t,", 0) == 0);
  CHECK((size_t)std::count(header.begin(), header.end(), ',') == 44);
  int data_rows = 0;
  std::string line;
  while (std::getline(f, line))
    if (!line.empty()) ++data_rows;
  CHECK(data_rows == 4 * 450);
}

TEST_CASE("cli simulate exits 1 when the run crashes") {
  TempDir tmp;
  // heavy plant flown with light-model gains and a wide-open lateral cap
  const std::string scn = tmp.file("crash.scn", R"(
[plant]
preset = high_inertia
[model]
preset = low_inertia
[failure]
motors = 2,4
[controller]
Q_n = 420
kp_z = 2.8
kd_z = 3.2
f_max = 13
wn_xy = 1.0
zeta_xy = 0.7
[initial]
x = -0.1
y = -0.1
z = 2
phi = 0.02
theta = -0.02
[references]
0 0 0 2
[run]
duration = 15
eq_source = plant
)");
  const CliRun r = cli({"simulate", "--scenario", scn});
  CHECK(r.code == 1);
  CHECK(value_of(r.out, "crashed") == 1);
  CHECK(value_of(r.out, "crash_t") > 0);
}

TEST_CASE("cli sysid fragments feed back into the other commands") {
  TempDir tmp;
  // thrust-stand rows planted on kf=1.2e-5, kt=1.6e-7, Rw=0.12
  const std::string csv = tmp.file("stand.csv",
                                   "omega,thrust,voltage,current\n"
                                   "400,1.9200000000000002,5.359999999999999,2\n"
                                   "600,4.32,11.88,3\n"
                                   "800,7.680000000000001,18.744444444444444,4.5\n"
                                   "1000,12.0,27.386666666666667,6\n");
  const std::string frag = tmp.name("prop.params");
  const CliRun fit = cli({"sysid", "fit-thrust", "--input", csv, "--out", frag});
  REQUIRE(fit.code == 0);
  CHECK(value_of(fit.out, "kf") == doctest::Approx(1.2e-5).epsilon(1e-10));
  CHECK(value_of(fit.out, "kt") == doctest::Approx(1.6e-7).epsilon(1e-10));
  CHECK(value_of(fit.out, "k") == doctest::Approx(75.0).epsilon(1e-10));

  // the emitted fragment is a loadable parameter file
  const QuadParams p = load_params_file(frag);
  CHECK(p.kf == doctest::Approx(1.2e-5).epsilon(1e-10));
  CHECK(p.M == doctest::Approx(1.439));  // everything else from the base preset

  // and the equilibrium command accepts it directly
  const CliRun eq = cli({"equilibrium", "--params", frag, "--failed", "2,4"});
  REQUIRE(eq.code == 0);
  // fbar is mass-only; wbar shifts with the fitted kf
  CHECK(value_of(eq.out, "fbar1") == doctest::Approx(7.055884675).epsilon(1e-10));
  CHECK(value_of(eq.out, "wbar1") ==
        doctest::Approx(std::sqrt(7.055884675 / 1.2e-5)).epsilon(1e-9));
}

TEST_CASE("cli sysid moi and drag fits") {
  TempDir tmp;
  const CliRun moi = cli({"sysid", "moi", "--mass", "1.439", "--pivot-distance", "0.30",
                          "--period", "1.25", "--axis", "xx"});
  REQUIRE(moi.code == 0);
  CHECK(value_of(moi.out, "J_pivot") == doctest::Approx(0.16755716880816374).epsilon(1e-10));
  CHECK(value_of(moi.out, "J_com") == doctest::Approx(0.03804716880816372).epsilon(1e-10));

  const std::string frag = tmp.name("jxx.params");
  const CliRun moi2 = cli({"sysid", "moi", "--mass", "1.439", "--pivot-distance", "0.30",
                           "--period", "1.25", "--axis", "xx", "--out", frag});
  REQUIRE(moi2.code == 0);
  CHECK(load_params_file(frag).Jxx == doctest::Approx(0.03804716880816372).epsilon(1e-10));

  const std::string dragcsv = tmp.file("drag.csv",
                                       "torque,omega_ss\n"
                                       "0.0184199,10\n0.0736796,20\n0.16577909999999998,30\n"
                                       "0.2947184,40\n0.4604975,50\n");
  const CliRun drag = cli({"sysid", "fit-drag", "--input", dragcsv});
  REQUIRE(drag.code == 0);
  CHECK(value_of(drag.out, "gamma") == doctest::Approx(0.000184199).epsilon(1e-10));
}

TEST_CASE("cli detect replays a logged spike into a verdict") {
  TempDir tmp;
  std::ostringstream log;
  log << "t,p,q,r,phi,theta\n";
  const double dt = 1.0 / 450.0;
  for (int k = 0; k < 450; ++k) {
    const double t = k * dt;
    const double s = std::max(0.0, t - 0.5);  // motor 4 cut at 0.5 s
    const double ramp = std::min(1.0, s / 0.05);
    log << t << "," << 2.0 * ramp << ",0," << 0.5 * ramp << "," << 0.12 * ramp << ",0\n";
  }
  const std::string path = tmp.file("spin.csv", log.str());
  const CliRun r = cli({"detect", "--log", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("verdict=4") != std::string::npos);
  CHECK(r.out.find("verdict=none") == std::string::npos);

  const std::string bad = tmp.file("short.csv", "t,p\n0,0\n");
  CHECK(cli({"detect", "--log", bad}).code == 2);
}

TEST_CASE("cli sweep runs a tiny bounded study") {
  TempDir tmp;
  const std::string scn = tmp.file("base.scn", R"(
[failure]
motors = 2,4
[initial]
z = 2
[references]
0 0 0 2
[run]
duration = 4
)");
  const CliRun r =
      cli({"sweep", "--scenario", scn, "--kind", "frequency", "--loop", "outer"});
  REQUIRE(r.code == 0);
  CHECK(value_of(r.out, "limit") >= 1.0);
  CHECK(value_of(r.out, "limit") <= 45.0);
  CHECK(value_of(r.out, "runs") >= 2);

  CHECK(cli({"sweep", "--scenario", scn, "--kind", "magic"}).code == 2);
  CHECK(cli({"sweep", "--scenario", scn, "--kind", "initial", "--var", "tilt"}).code == 2);
}

#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "nlint/scenario.hpp"
#include "support.hpp"

using namespace nlint;

namespace {

const char* kMinimal = R"(
[crystal]
preset = mgo-ln-532
length_mm = 5

[pump]
T0_ps = 2

[tasks]
run = g1_scan
)";

std::string with(const std::string& extra) { return std::string(kMinimal) + extra; }

void check_error(const std::string& text, ErrorKind kind, const std::string& fragment) {
  try {
    (void)parse_scenario(text);
    FAIL("expected a scenario error containing: " << fragment);
  } catch (const Error& e) {
    CHECK(e.kind() == kind);
    CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
  }
}

}  // namespace

TEST_CASE("minimal scenario gets defaults") {
  const Scenario s = parse_scenario(kMinimal);
  CHECK(s.crystal == CrystalParams::mgo_ln_532(5.0).fields());
  CHECK(s.T0_fs == 2000.0);
  CHECK(s.synchronize);
  CHECK(s.geometry.z1 == 100.0);
  CHECK(s.geometry.z2 == 50.0);
  const CrystalParams c(s.crystal);
  CHECK(std::abs(timing_from_geometry(s.geometry, c).T2) < 1e-9);
  CHECK(std::abs(timing_from_geometry(s.geometry, c).delta_z) < 1e-12);
  CHECK(s.sample.kind == SampleKind::Mirror);
  CHECK(s.scan.automatic);
  CHECK(s.scan.points == 201);
  CHECK(s.grid.points == 1024);
  CHECK(s.grid.kernel == Kernel::Exact);
  CHECK(s.tasks == std::vector<Task>{Task::G1Scan});
  CHECK(s.output.format == Format::Csv);
  CHECK(s.output.dir == "out");
}

TEST_CASE("explicit crystal without a preset") {
  const Scenario s = parse_scenario(R"(
[crystal]
length_mm = 2
D_fs_per_mm = 150
N_i_fs_per_mm = 7000
lambda_p_nm = 400
lambda_s_nm = 800
lambda_i_nm = 800
[pump]
T0_fs = 50
[tasks]
run = spectrum, schmidt
)");
  CHECK(s.crystal.D == 150.0);
  CHECK(s.crystal.D_plus == 0.0);
  CHECK(s.crystal.sigma == 1.0);
  CHECK(s.tasks.size() == 2);
  check_error("[crystal]\nlength_mm = 2\n[pump]\nT0_fs = 5\n[tasks]\nrun = spectrum\n",
              ErrorKind::Validation, "crystal.D_fs_per_mm");
}

TEST_CASE("syntax errors carry line numbers") {
  check_error("[crystal]\npreset = mgo-ln-532\nlength_mm 5\n", ErrorKind::Parse, "line 3");
  check_error("[crystal\n", ErrorKind::Parse, "line 1");
  check_error("length_mm = 5\n", ErrorKind::Parse, "line 1");
  check_error(with("[scan]\npoints = many\n"), ErrorKind::Parse, "line 12");
  check_error(with("[scan]\nfringes = maybe\n"), ErrorKind::Parse, "scan.fringes");
  check_error(with("[pump]\n"), ErrorKind::Parse, "duplicate section");
  check_error("[crystal]\nlength_mm = 1\nlength_mm = 2\n", ErrorKind::Parse, "duplicate key");
  check_error(with("[lasers]\n"), ErrorKind::Parse, "unknown section");
  check_error(with("[output]\ndir =\n"), ErrorKind::Parse, "missing value");
}

TEST_CASE("unknown keys are rejected") {
  check_error(with("[sample]\ntype = mirror\nr0 = 0.5\n"), ErrorKind::Validation, "unknown key 'r0'");
  check_error(with("[grid]\nresolution = 5\n"), ErrorKind::Validation, "line 12");
}

TEST_CASE("invariant violations name the field") {
  check_error(with("[sample]\ntype = bilayer\nr0 = 0.7\nr1 = 0.5\nthickness_um = 20\nlayer_index = 1.5\n"),
              ErrorKind::Validation, "sample");
  check_error(with("[sample]\ntype = uniform\nr_re = 1.2\n"), ErrorKind::Validation, "sample");
  check_error(std::string(kMinimal).replace(std::string(kMinimal).find("length_mm = 5"), 13, "length_mm = -1"),
              ErrorKind::Validation, "crystal.length_mm");
  check_error(with("[geometry]\nzp2_mm = 4\n"), ErrorKind::Validation, "geometry.zp2_mm");
  check_error("[crystal]\npreset = mgo-ln-532\nlength_mm = 5\n[pump]\nT0_fs = 1\nT0_ps = 1\n[tasks]\nrun = g1_scan\n",
              ErrorKind::Validation, "pump");
  check_error("[crystal]\npreset = mgo-ln-532\nlength_mm = 5\n[pump]\nT0_fs = 1\n[tasks]\nrun = plot\n",
              ErrorKind::Validation, "unknown task 'plot'");
  check_error("[crystal]\npreset = mgo-ln-532\nlength_mm = 5\n[pump]\nT0_fs = 1\n[tasks]\nrun = ,\n",
              ErrorKind::Validation, "tasks.run");
  check_error("[crystal]\npreset = mgo-ln-532\nlength_mm = 5\n[pump]\nT0_fs = 1\n", ErrorKind::Validation,
              "[tasks]");
  check_error(with("[grid]\npoints = 64\n"), ErrorKind::Validation, "grid.points");
  check_error(with("[scan]\nrange = explicit\nstart_mm = 1\nstop_mm = 0\n"), ErrorKind::Validation,
              "scan.stop_mm");
  check_error(with("[output]\nformat = xml\n"), ErrorKind::Validation, "output.format");
  check_error(with("[crystal]\n"), ErrorKind::Parse, "duplicate section");
}

TEST_CASE("glass-slab preset resolves to Fresnel coefficients") {
  const Scenario s = parse_scenario(with("[sample]\npreset = glass-slab-20um\n"));
  REQUIRE(s.sample.kind == SampleKind::Bilayer);
  CHECK(s.sample.layers.r0 == doctest::Approx(-0.2));
  CHECK(s.sample.layers.r1 == doctest::Approx(0.8 * 0.2 / 2.8 * 1.2));
  CHECK(s.sample.layers.thickness_um == 20.0);
  CHECK(s.sample.layers.layer_index == 1.5);
  CHECK(s.sample.layers.carrier_omega == CrystalParams(s.crystal).omega_i0());
  check_error(with("[sample]\npreset = glass-slab-20um\nr0 = 0.1\n"), ErrorKind::Validation, "either");
}

TEST_CASE("2 ps g1 recipe") {
  const Scenario s = parse_scenario(R"(
# 2 ps g1 scan
[crystal]
preset = mgo-ln-532
length_mm = 5
[pump]
T0_ps = 2
[sample]
type = mirror
[scan]
points = 201
[tasks]
run = g1_scan
)");
  CHECK(s.crystal.length_mm == 5.0);
  CHECK(s.T0_fs == 2000.0);
  CHECK(s.scan.points == 201);
}

TEST_CASE("render then parse is the identity") {
  const std::string cases[] = {
      kMinimal,
      with("[sample]\npreset = glass-slab-20um\n[scan]\nfringes = true\n[grid]\npoints = 2048\n"
           "[output]\nformat = json\nprefix = x\ndir = /tmp/somewhere\n"),
      with("[sample]\ntype = uniform\nr_re = 0.3\nr_im = -0.4\n[geometry]\nsynchronize = false\n"
           "zp2_mm = 123.456\nz1_mm = 80\n"),
      with("[sample]\ntype = tabulated\nomega_rad_per_fs = -0.1, 0, 0.1\nr_re = 0.1, 0.5, 0.2\n"
           "r_im = 0, 0.1, 0\n[scan]\nrange = explicit\nstart_mm = -0.2\nstop_mm = 0.3\npoints = 17\n"),
      with("[grid]\nkernel = gaussian\npump_nodes = 129\nmismatch_step = 0.25\nmismatch_extent = 512\n"
           "pump_extent = 6.5\n"),
  };
  for (const auto& text : cases) {
    const Scenario s = parse_scenario(text);
    const std::string rendered = render_scenario(s);
    CAPTURE(rendered);
    CHECK(parse_scenario(rendered) == s);
    CHECK(render_scenario(parse_scenario(rendered)) == rendered);
  }
}

TEST_CASE("round trip holds for randomized scenarios") {
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pick = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  const char* tasks[] = {"joint_spectrum", "schmidt", "g1_scan", "oct_scan", "spectrum"};

  for (int trial = 0; trial < 200; ++trial) {
    std::ostringstream t;
    t.precision(17);
    const double lp = pick(400, 600), ls = pick(700, 900);
    const double li = 1.0 / (1.0 / lp - 1.0 / ls);
    t << "[crystal]\nlength_mm = " << pick(0.1, 20) << "\nD_fs_per_mm = " << pick(-500, 500) + 600.0 * (u(rng) < 0.5 ? -1 : 1)
      << "\nD_plus_fs_per_mm = " << pick(-1000, 1000) << "\nN_i_fs_per_mm = " << pick(5000, 9000)
      << "\nlambda_p_nm = " << lp << "\nlambda_s_nm = " << ls << "\nlambda_i_nm = " << li
      << "\nsigma = " << pick(0, 3) << "\n";
    t << "[pump]\n" << (u(rng) < 0.5 ? "T0_fs = " : "T0_ps = ") << pick(1, 1000) << "\n";
    if (u(rng) < 0.5) t << "[geometry]\nz1_mm = " << pick(0, 300) << "\nz2_mm = " << pick(0, 100) << "\n";
    const double kind = u(rng);
    if (kind < 0.25) {
      t << "[sample]\ntype = uniform\nr_re = " << pick(-0.7, 0.7) << "\nr_im = " << pick(-0.7, 0.7) << "\n";
    } else if (kind < 0.5) {
      t << "[sample]\ntype = bilayer\nn_ambient = " << pick(1, 2) << "\nn_layer = " << pick(1, 2)
        << "\nn_substrate = " << pick(1, 2) << "\nthickness_um = " << pick(0, 50) << "\n";
    } else if (kind < 0.75) {
      t << "[sample]\ntype = tabulated\nomega_rad_per_fs = " << pick(-1, -0.5) << ", " << pick(-0.4, 0.4)
        << ", " << pick(0.5, 1) << "\nr_re = " << pick(0, 0.7) << ", " << pick(0, 0.7) << ", "
        << pick(0, 0.7) << "\n";
    }
    if (u(rng) < 0.5) t << "[scan]\nrange = explicit\nstart_mm = " << pick(-1, 0) << "\nstop_mm = " << pick(0.01, 1)
                        << "\npoints = " << int(pick(3, 500)) << "\nfringes = " << (u(rng) < 0.5 ? "true" : "false") << "\n";
    t << "[grid]\npoints = " << int(pick(256, 4096)) << "\nmismatch_step = " << pick(0.1, 1) << "\n";
    t << "[tasks]\nrun = " << tasks[trial % 5] << ", " << tasks[(trial + 2) % 5] << "\n";
    t << "[output]\nformat = " << (u(rng) < 0.5 ? "csv" : "json") << "\nprefix = p" << trial << "\n";

    const Scenario s = parse_scenario(t.str());
    CAPTURE(t.str());
    CHECK(parse_scenario(render_scenario(s)) == s);
  }
}

TEST_CASE("tasks and presets are enumerable") {
  for (Task t : {Task::JointSpectrum, Task::Schmidt, Task::G1Scan, Task::OctScan, Task::Spectrum})
    CHECK(parse_task(to_string(t)) == t);
  const auto presets = list_presets();
  REQUIRE(presets.size() == 2);
  CHECK(presets[0].name == "mgo-ln-532");
  CHECK(presets[1].name == "glass-slab-20um");
}

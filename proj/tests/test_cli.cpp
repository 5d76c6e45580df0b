#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "jackknife/estimation.hpp"
#include "jackknife/simulator.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run_jk(const std::string& args) {
  fs::path out = fs::temp_directory_path() / "jk_cli_stdout.txt";
  std::string cmd = std::string(JK_BINARY) + " " + args + " > " + out.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(rc);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.stdout_text = ss.str();
  return r;
}

std::string cfg(const std::string& name) {
  return (fs::path(JK_CONFIG_DIR) / name).string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  fs::path p = fs::temp_directory_path() / "jk_cli_test";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("limits verb on the reference configurations") {
  fs::path out = scratch() / "limits";
  RunResult r = run_jk("limits --config " + cfg("long_trailer_limits.json") + " --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.find("subcase:  L-4") != std::string::npos);
  CHECK(r.stdout_text.find("-37.82") != std::string::npos);
  CHECK(fs::exists(out / "limits.csv"));

  RunResult r8 = run_jk("limits --config " + cfg("medium_trailer_limits.json"));
  CHECK(r8.exit_code == 0);
  CHECK(r8.stdout_text.find("M-5") != std::string::npos);
  CHECK(r8.stdout_text.find("psi_minus_kmin: 84.38") != std::string::npos);
  CHECK(r8.stdout_text.find("unsafe") != std::string::npos);

  RunResult r1 = run_jk("limits --config " + cfg("l1_limits.json"));
  CHECK(r1.exit_code == 0);
  CHECK(r1.stdout_text.find("no jackknife limit") != std::string::npos);
  CHECK(r1.stdout_text.find("L-1") != std::string::npos);
}

TEST_CASE("regions verb") {
  RunResult r = run_jk("regions --config " + cfg("long_trailer_limits.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.find("non-jackknife:") != std::string::npos);
  CHECK(r.stdout_text.find("(wraps)") != std::string::npos);

  RunResult r1 = run_jk("regions --config " + cfg("l1_limits.json"));
  CHECK(r1.exit_code == 0);
  CHECK(r1.stdout_text.find("(full circle)") != std::string::npos);
}

TEST_CASE("simulate verb writes a trajectory") {
  fs::path out = scratch() / "sim";
  RunResult r = run_jk("simulate --config " + cfg("constant_steering_kmax.json") + " --out " + out.string());
  CHECK(r.exit_code == 0);
  fs::path csv = out / "constant_steering_kmax_trajectory.csv";
  REQUIRE(fs::exists(csv));
  std::string body = slurp(csv);
  CHECK(body.rfind(jackknife::TrajectoryLog::csv_header(), 0) == 0);

  // deterministic: a second run reproduces the bytes
  fs::path out2 = scratch() / "sim2";
  run_jk("simulate --config " + cfg("constant_steering_kmax.json") + " --out " + out2.string());
  CHECK(slurp(out2 / "constant_steering_kmax_trajectory.csv") == body);
}

TEST_CASE("oracle-check verb is deterministic and clean") {
  RunResult r = run_jk("oracle-check --n 25 --seed 3");
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.find("mismatches: 0") != std::string::npos);
  RunResult r2 = run_jk("oracle-check --n 25 --seed 3");
  CHECK(r2.stdout_text == r.stdout_text);
}

TEST_CASE("sweep verb emits the grid and flatness diagnostic") {
  fs::path out = scratch() / "sweep";
  RunResult r = run_jk("sweep --config " + cfg("sweep.json") + " --grid 21 --out " + out.string());
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(out / "sweep_psi_plus_kmax.csv"));
  REQUIRE(fs::exists(out / "sweep_contour_flatness.csv"));

  std::string grid = slurp(out / "sweep_psi_plus_kmax.csv");
  CHECK(grid.find("beta_r_rad") == 0);
  // 21 data rows plus header
  CHECK(std::count(grid.begin(), grid.end(), '\n') == 22);

  // zero-slip center cell equals the closed form for this vehicle
  {
    std::istringstream is(grid);
    std::string line;
    for (int i = 0; i <= 11; ++i) std::getline(is, line);  // header + rows 0..10
    std::stringstream row(line);
    std::string cell;
    for (int c = 0; c <= 11; ++c) std::getline(row, cell, ',');
    CHECK(std::stod(cell) == doctest::Approx(-2.9022031922211884).epsilon(1e-12));
  }

  fs::path out2 = scratch() / "sweep2";
  run_jk("sweep --config " + cfg("sweep.json") + " --grid 21 --out " + out2.string());
  CHECK(slurp(out2 / "sweep_psi_plus_kmax.csv") == grid);
}

TEST_CASE("estimate verb round trips a generated stream") {
  using namespace jackknife;
  Scenario sc;
  sc.name = "gen";
  sc.params = VehicleTrailerParams::car_like(3.0, 1.23, 2.51, 17.6, deg2rad(500.0), deg2rad(400.0));
  sc.v = 1.0;
  sc.duration = 20.0;
  sc.dt = 0.01;
  sc.initial.psi = deg2rad(-30.0);
  sc.initial.phi = deg2rad(500.0) / sc.params.steering_ratio;
  sc.controller_type = Scenario::ControllerType::ConstantSteering;
  sc.constant_wheel_angle = deg2rad(500.0);
  sc.slip_type = Scenario::SlipType::TerrainCosine;
  sc.slip_amplitude = deg2rad(5.0);
  TrajectoryLog log = run_scenario(sc);

  std::vector<SensorSample> stream;
  for (const auto& row : log.rows)
    stream.push_back({row.t, sc.v * row.kappa, sc.v, row.psi, row.phi_wheel});
  fs::path streamfile = scratch() / "stream.csv";
  {
    std::ofstream os(streamfile);
    write_sensor_csv(os, stream);
  }

  fs::path out = scratch() / "est";
  for (const std::string mode : {"slip_partial", "slip_ignorant"}) {
    RunResult r = run_jk("estimate --config " + cfg("estimate_params.json") + " --in " +
                         streamfile.string() + " --mode " + mode + " --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(out / ("estimate_" + mode + ".csv")));
  }

  RunResult bad = run_jk("estimate --config " + cfg("estimate_params.json") + " --in " +
                         streamfile.string() + " --mode bogus");
  CHECK(bad.exit_code == 1);
}

TEST_CASE("invalid inputs exit with the validation code") {
  CHECK(run_jk("limits --config /nonexistent.json").exit_code == 1);
  CHECK(run_jk("limits").exit_code == 1);

  fs::path broken = scratch() / "broken.json";
  {
    std::ofstream os(broken);
    os << "{\"params\": {\"wheelbase\": -3.0, \"kappa_min\": -1.0, \"kappa_max\": 1.0}}";
  }
  CHECK(run_jk("limits --config " + broken.string()).exit_code == 1);
}

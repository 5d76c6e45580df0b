#include <doctest.h>

#include <cmath>
#include <sstream>

#include "jackknife/oracle.hpp"
#include "jackknife/simulator.hpp"

using namespace jackknife;

namespace {

VehicleTrailerParams reference_vehicle() {
  return VehicleTrailerParams::car_like(3.0, 1.23, 2.51, 17.6, deg2rad(500.0), deg2rad(400.0));
}

const SideslipState kNoSlip{};

Scenario constant_steering_scenario(double wheel_deg, double psi0_deg, double duration,
                                    double v = -1.0) {
  Scenario sc;
  sc.name = "const";
  sc.params = reference_vehicle();
  sc.initial.psi = deg2rad(psi0_deg);
  sc.initial.phi = deg2rad(wheel_deg) / sc.params.steering_ratio;
  sc.v = v;
  sc.duration = duration;
  sc.dt = 0.01;
  sc.controller_type = Scenario::ControllerType::ConstantSteering;
  sc.constant_wheel_angle = deg2rad(wheel_deg);
  return sc;
}

}  // namespace

TEST_CASE("integration freezes at zero velocity") {
  SystemState st;
  st.x = 1.0;
  st.psi = deg2rad(20.0);
  SystemState next = integrate_step(st, ControlInput::curvature(0.0, 0.1), reference_vehicle(),
                                    kNoSlip, 0.01);
  CHECK(next.x == st.x);
  CHECK(next.y == st.y);
  CHECK(next.theta_v == st.theta_v);
  CHECK(next.psi == st.psi);
}

TEST_CASE("straight backing from an aligned trailer stays aligned") {
  SystemState st;
  VehicleTrailerParams p = reference_vehicle();
  for (int i = 0; i < 1000; ++i)
    st = integrate_step(st, ControlInput::curvature(-1.0, 0.0), p, kNoSlip, 0.01);
  CHECK(std::abs(st.psi) < 1e-12);
  CHECK(st.x == doctest::Approx(-10.0).epsilon(1e-12));
}

TEST_CASE("step halving shows fourth-order convergence") {
  VehicleTrailerParams p = reference_vehicle();
  SideslipState s{0.1, -0.05, 0.08};
  ControlInput u = ControlInput::curvature(-1.0, 0.12);

  auto run = [&](double dt) {
    SystemState st;
    st.psi = deg2rad(10.0);
    int n = static_cast<int>(std::llround(2.0 / dt));
    for (int i = 0; i < n; ++i) st = integrate_step(st, u, p, s, dt);
    return st.psi;
  };

  double ref = run(0.08 / 64.0);
  double e1 = std::abs(run(0.08) - ref);
  double e2 = std::abs(run(0.04) - ref);
  double ratio = e1 / e2;
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("steering actuator saturates range and rate") {
  VehicleTrailerParams p = reference_vehicle();
  p.steering_wheel_rate_limit = deg2rad(120.0);

  CHECK(steering_actuator(deg2rad(10.0), deg2rad(11.0), p, 0.1) == doctest::Approx(deg2rad(11.0)));
  CHECK(steering_actuator(0.0, deg2rad(500.0), p, 0.1) == doctest::Approx(deg2rad(12.0)));
  CHECK(steering_actuator(deg2rad(499.0), deg2rad(600.0), p, 1.0) ==
        doctest::Approx(deg2rad(500.0)));
  CHECK(steering_actuator(deg2rad(-10.0), deg2rad(-500.0), p, 0.1) ==
        doctest::Approx(deg2rad(-22.0)));
}

TEST_CASE("terrain sideslip schedule") {
  SideslipState s1 = sideslip_schedule_terrain(kPi / 2.0, kPi / 2.0, 0.0, kPi / 6.0);
  CHECK(std::abs(s1.beta_f) < 1e-15);
  CHECK(std::abs(s1.beta_r) < 1e-15);
  CHECK(std::abs(s1.beta_t) < 1e-15);

  SideslipState s2 = sideslip_schedule_terrain(0.0, 0.0, 0.0, kPi / 6.0);
  CHECK(s2.beta_f == doctest::Approx(deg2rad(30.0)));
  CHECK(s2.beta_r == doctest::Approx(deg2rad(30.0)));
  CHECK(s2.beta_t == doctest::Approx(deg2rad(30.0)));

  SideslipState s3 = sideslip_schedule_terrain(1.0, 2.0, 0.5, 0.0);
  CHECK(s3.beta_f == 0.0);
  CHECK(s3.beta_r == 0.0);
  CHECK(s3.beta_t == 0.0);
}

TEST_CASE("scenario log has a uniform grid and consistent limit columns") {
  Scenario sc = constant_steering_scenario(500.0, 0.0, 5.0);
  TrajectoryLog log = run_scenario(sc);
  REQUIRE(log.rows.size() == 501);
  for (std::size_t i = 1; i < log.rows.size(); ++i)
    CHECK(log.rows[i].t - log.rows[i - 1].t == doctest::Approx(sc.dt).epsilon(1e-9));

  // zero slip: limit columns equal the fixed zero-slip limits
  JackknifeLimitSet lims = jackknife_limits(sc.params, kNoSlip);
  const TrajectoryRow& r = log.rows[100];
  for (int k = 0; k < 4; ++k) {
    REQUIRE(r.limits[static_cast<std::size_t>(k)].has_value());
    CHECK(*r.limits[static_cast<std::size_t>(k)] ==
          doctest::Approx(lims.limits[static_cast<std::size_t>(k)].psi).epsilon(1e-12));
  }

  std::ostringstream os;
  log.write_csv(os);
  std::string csv = os.str();
  CHECK(csv.find("t,x,y,theta_v") == 0);
}

TEST_CASE("vehicle advances by |v| dt along its heading") {
  Scenario sc = constant_steering_scenario(300.0, 10.0, 4.0);
  TrajectoryLog log = run_scenario(sc);
  for (std::size_t i = 1; i < log.rows.size(); ++i) {
    double dx = log.rows[i].x - log.rows[i - 1].x;
    double dy = log.rows[i].y - log.rows[i - 1].y;
    CHECK(std::hypot(dx, dy) == doctest::Approx(std::abs(sc.v) * sc.dt).epsilon(1e-7));
  }
}

TEST_CASE("hitch trajectories under intermediate curvature stay inside the envelope") {
  double psi0 = 10.0;
  TrajectoryLog hi = run_scenario(constant_steering_scenario(500.0, psi0, 20.0));
  TrajectoryLog lo = run_scenario(constant_steering_scenario(-500.0, psi0, 20.0));
  TrajectoryLog mid = run_scenario(constant_steering_scenario(137.0, psi0, 20.0));
  REQUIRE(hi.rows.size() == mid.rows.size());

  // compare in the unwrapped frame; the kappa_max trajectory passes +-pi
  auto unwrap = [](const TrajectoryLog& log) {
    std::vector<double> out;
    double acc = log.rows.front().psi, prev = acc;
    for (const auto& r : log.rows) {
      acc += angle_diff(r.psi, prev);
      prev = r.psi;
      out.push_back(acc);
    }
    return out;
  };
  std::vector<double> uh = unwrap(hi), ul = unwrap(lo), um = unwrap(mid);
  for (std::size_t i = 0; i < um.size(); ++i) {
    CHECK(um[i] <= uh[i] + 1e-9);
    CHECK(um[i] >= ul[i] - 1e-9);
  }
}

TEST_CASE("backing constant steering converges to the safe limit without crossing") {
  // start inside a jackknife region; the hitch angle moves one way until the
  // safe limit generated by the applied curvature bound
  Scenario sc = constant_steering_scenario(500.0, 60.0, 80.0);
  TrajectoryLog log = run_scenario(sc);

  JackknifeLimitSet lims = jackknife_limits(sc.params, kNoSlip);
  double safe = lims.get(LimitKind::PsiPlusKappaMax).psi;  // backing, kappa_max

  double unwrapped = log.rows.front().psi;
  double prev = unwrapped;
  for (const auto& r : log.rows) {
    double step = angle_diff(r.psi, prev);
    CHECK(step >= -1e-9);  // monotone rise through the jackknife region
    unwrapped += step;
    prev = r.psi;
  }
  CHECK(std::abs(angle_diff(log.rows.back().psi, safe)) < deg2rad(1.0));
  // never crosses the safe limit outward: 60 deg start, safe limit one turn
  // up at 360 - 166.284 = 193.716 deg unwrapped
  CHECK(unwrapped <= deg2rad(193.717));
}

TEST_CASE("medium trailer entering its jackknife region rises to the safe limit") {
  Scenario sc;
  sc.name = "medium";
  sc.params = VehicleTrailerParams::car_like(3.0, 1.23, 1.25, 17.6, deg2rad(1400.0),
                                             deg2rad(400.0));
  SideslipState slip{0.0, deg2rad(30.0), deg2rad(30.0)};
  sc.slip_constant = slip;
  sc.initial.psi = deg2rad(90.0);  // just above the unsafe limit at 84.4 deg
  sc.initial.phi = -sc.params.max_road_wheel_angle();
  sc.v = -1.0;
  sc.duration = 40.0;
  sc.dt = 0.005;
  sc.controller_type = Scenario::ControllerType::ConstantSteering;
  sc.constant_wheel_angle = -sc.params.steering_wheel_limit;
  TrajectoryLog log = run_scenario(sc);

  CHECK(log.rows.front().jackknife);
  double safe = 3.1269740248381095;  // psi+_kmin under this slip
  CHECK(std::abs(angle_diff(log.rows.back().psi, safe)) < deg2rad(1.0));
  double prev = log.rows.front().psi;
  for (const auto& r : log.rows) {
    CHECK(r.psi >= prev - 1e-9);
    prev = r.psi;
  }
}

TEST_CASE("backing controller is quiet at the regulation point") {
  VehicleTrailerParams p = reference_vehicle();
  SystemState st;
  st.theta_v = 0.0;
  st.psi = 0.0;
  Path path;  // x axis, travel toward -x
  double cmd = backing_controller(st, path, ControllerGains{}, -1.0, p, kPi, nullptr,
                                  deg2rad(15.0), nullptr, 0.01);
  CHECK(std::abs(cmd) < 1e-9);
}

TEST_CASE("scenario validation rejects a coarse time step") {
  Scenario sc = constant_steering_scenario(500.0, 0.0, 5.0);
  sc.dt = 0.5;
  CHECK_THROWS_AS(run_scenario(sc), DomainError);
}

TEST_CASE("scenario json round trip") {
  const char* text = R"({
    "name": "t",
    "params": {"wheelbase": 3.0, "hitch_length": 1.23, "tongue_length": 2.51,
               "steering_ratio": 17.6, "steering_wheel_limit_deg": 500.0,
               "steering_wheel_rate_limit_deg_per_s": 400.0},
    "initial": {"y": 2.0, "hitch_deg": 5.0, "wheel_deg": 100.0},
    "v": -1.0, "duration_s": 10.0, "dt_s": 0.01,
    "slip": {"type": "constant", "beta_r_deg": 5.0},
    "controller": {"type": "backing", "limit_mode": "slip_aware", "margin_deg": 15.0,
                   "gains": {"lateral": 0.3}},
    "path": {"heading_deg": 180.0}
  })";
  Scenario sc = scenario_from_json_text(text);
  CHECK(sc.initial.y == 2.0);
  CHECK(sc.initial.psi == doctest::Approx(deg2rad(5.0)));
  CHECK(sc.initial.phi == doctest::Approx(deg2rad(100.0 / 17.6)));
  CHECK(sc.slip_constant.beta_r == doctest::Approx(deg2rad(5.0)));
  CHECK(sc.backing.limit_mode == LimitMode::SlipAware);
  CHECK(sc.backing.gains.lateral == 0.3);
  CHECK(sc.params.kappa_max.value() == doctest::Approx(0.18030101787812317).epsilon(1e-14));
  CHECK_THROWS_AS(scenario_from_json_text("{\"params\": {}}"), std::exception);
}

#include "jackknife/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace jackknife {

double Path::lateral_offset(double px, double py) const {
  double dx = std::cos(heading), dy = std::sin(heading);
  return dx * (py - y) - dy * (px - x);
}

void Scenario::validate() const {
  params.validate();
  if (!(dt > 0.0)) throw DomainError("dt must be > 0");
  if (!(duration >= dt)) throw DomainError("duration must be >= dt");
  if (std::abs(v) * dt > params.tongue_length / 20.0)
    throw DomainError("time step too coarse: |v|*dt must be <= L2/20");
  if (!params.has_steering()) throw DomainError("simulation requires a steering map");
}

std::array<double, 2> trailer_axle(const SystemState& state, const VehicleTrailerParams& p) {
  double theta_t = state.theta_v + state.psi;
  double hx = state.x - p.hitch_length * std::cos(state.theta_v);
  double hy = state.y - p.hitch_length * std::sin(state.theta_v);
  return {hx - p.tongue_length * std::cos(theta_t), hy - p.tongue_length * std::sin(theta_t)};
}

SystemState integrate_step(const SystemState& state, const ControlInput& u,
                           const VehicleTrailerParams& p, const SideslipState& slip, double dt) {
  auto deriv = [&](const SystemState& s) { return state_derivative(s, u, p, slip); };
  auto advance = [](const SystemState& s, const StateRate& r, double h) {
    SystemState n = s;
    n.x += r.x_dot * h;
    n.y += r.y_dot * h;
    n.theta_v += r.theta_v_dot * h;
    n.psi += r.psi_dot * h;
    return n;
  };

  StateRate k1 = deriv(state);
  StateRate k2 = deriv(advance(state, k1, dt / 2.0));
  StateRate k3 = deriv(advance(state, k2, dt / 2.0));
  StateRate k4 = deriv(advance(state, k3, dt));

  SystemState next = state;
  next.x += dt / 6.0 * (k1.x_dot + 2.0 * k2.x_dot + 2.0 * k3.x_dot + k4.x_dot);
  next.y += dt / 6.0 * (k1.y_dot + 2.0 * k2.y_dot + 2.0 * k3.y_dot + k4.y_dot);
  next.theta_v += dt / 6.0 * (k1.theta_v_dot + 2.0 * k2.theta_v_dot + 2.0 * k3.theta_v_dot + k4.theta_v_dot);
  next.psi += dt / 6.0 * (k1.psi_dot + 2.0 * k2.psi_dot + 2.0 * k3.psi_dot + k4.psi_dot);
  next.psi = wrap_angle(next.psi);

  if (!std::isfinite(next.x) || !std::isfinite(next.y) || !std::isfinite(next.theta_v) ||
      !std::isfinite(next.psi))
    throw NumericError("state became non-finite during integration");
  return next;
}

double steering_actuator(double current_wheel_angle, double commanded_wheel_angle,
                         const VehicleTrailerParams& p, double dt) {
  double target = std::clamp(commanded_wheel_angle, -p.steering_wheel_limit, p.steering_wheel_limit);
  double max_step = p.steering_wheel_rate_limit * dt;
  double delta = target - current_wheel_angle;
  if (p.steering_wheel_rate_limit > 0.0) delta = std::clamp(delta, -max_step, max_step);
  return std::clamp(current_wheel_angle + delta, -p.steering_wheel_limit, p.steering_wheel_limit);
}

SideslipState sideslip_schedule_terrain(double theta_v, double theta_t, double phi,
                                        double amplitude) {
  SideslipState s;
  s.beta_f = amplitude * std::cos(theta_v + phi);
  s.beta_r = amplitude * std::cos(theta_v);
  s.beta_t = amplitude * std::cos(theta_t);
  return s;
}

double backing_controller(const SystemState& state, const Path& path, const ControllerGains& gains,
                          double v, const VehicleTrailerParams& p, double axle_course,
                          const RegionMap* regions, double margin, ControllerMemory* memory,
                          double dt) {
  const SideslipState no_slip{};
  auto axle = trailer_axle(state, p);
  double e = path.lateral_offset(axle[0], axle[1]);
  double theta_t = state.theta_v + state.psi;

  // Desired travel heading of the trailer axle that closes the lateral
  // error. The integral term trims the steady offset left by unmodeled
  // slip; it only engages near the path and its authority is capped, so the
  // large-error approach phase cannot wind it up.
  double trim = 0.0;
  if (memory != nullptr && gains.lateral_integral > 0.0) {
    double cap = gains.integral_clamp / gains.lateral_integral;
    if (std::abs(e) < 0.5)
      memory->lateral_integral = std::clamp(memory->lateral_integral + e * dt, -cap, cap);
    trim = gains.lateral_integral * memory->lateral_integral;
  }
  double travel_off = std::clamp(gains.lateral * e + trim, -gains.travel_heading_clamp,
                                 gains.travel_heading_clamp);
  double travel_des = path.heading - travel_off;
  double travel_now = std::isfinite(axle_course) ? axle_course
                                                 : theta_t + (v < 0.0 ? kPi : 0.0);
  double heading_err = wrap_angle(travel_des - travel_now);

  // Hitch setpoint: when backing a positive hitch angle raises the trailer
  // heading; pulling forward reverses the sense.
  double dir = v < 0.0 ? 1.0 : -1.0;
  double psi_d = std::clamp(dir * gains.heading * heading_err, -gains.hitch_setpoint_clamp,
                            gains.hitch_setpoint_clamp);

  if (regions != nullptr && !regions->nonjackknife.empty()) {
    const CircularInterval* active = nullptr;
    for (const auto& iv : regions->nonjackknife)
      if (iv.contains(state.psi)) { active = &iv; break; }
    if (active == nullptr)
      for (const auto& iv : regions->nonjackknife)
        if (iv.contains(psi_d)) { active = &iv; break; }
    if (active != nullptr) psi_d = active->clamp_inside(psi_d, margin);
  }

  // Feedback linearization of the zero-slip hitch dynamics:
  // psi_dot = k (psi_d - psi). The hitch error is the plain difference of
  // the wrapped representatives: the setpoint is always approached without
  // passing through +-pi, where vehicle and trailer would collide.
  HitchRateAffine aff = hitch_rate_affine(state.psi, p, no_slip);
  double kappa_cmd = 0.0;
  auto ks = critical_curvature(state.psi, p, no_slip);
  if (ks && std::abs(aff.kappa_coeff) > 1e-9) {
    kappa_cmd = *ks + gains.hitch * (psi_d - wrap_angle(state.psi)) / (-v * aff.kappa_coeff);
  }

  double phi_cmd = steering_from_curvature(kappa_cmd, no_slip, p.wheelbase);
  return std::clamp(phi_cmd * p.steering_ratio, -p.steering_wheel_limit, p.steering_wheel_limit);
}

namespace {

SideslipState scenario_slip(const Scenario& sc, const SystemState& state) {
  if (sc.slip_type == Scenario::SlipType::Constant) return sc.slip_constant;
  return sideslip_schedule_terrain(state.theta_v, state.theta_v + state.psi,
                                   state.phi, sc.slip_amplitude);
}

}  // namespace

TrajectoryLog run_scenario(const Scenario& sc) {
  sc.validate();
  TrajectoryLog log;
  int steps = static_cast<int>(std::llround(sc.duration / sc.dt));
  log.rows.reserve(static_cast<std::size_t>(steps) + 1);

  SystemState state = sc.initial;
  double wheel = state.phi * sc.params.steering_ratio;

  // Fixed zero-slip limits for the slip-ignorant clamp.
  RegionMap fixed_regions;
  bool have_fixed = false;
  if (sc.controller_type == Scenario::ControllerType::Backing &&
      sc.backing.limit_mode == LimitMode::SlipIgnorant) {
    fixed_regions = region_map(sc.params, SideslipState{});
    have_fixed = true;
  }

  std::array<double, 2> prev_axle{};
  bool have_prev_axle = false;
  ControllerMemory memory;

  for (int i = 0; i <= steps; ++i) {
    double t = i * sc.dt;
    SideslipState slip = scenario_slip(sc, state);

    // Achievable curvature range under the instantaneous slip.
    VehicleTrailerParams p_now = sc.params;
    auto [klo, khi] = achievable_curvature_bounds(sc.params, slip);
    p_now.kappa_min = klo;
    p_now.kappa_max = khi;

    double wheel_cmd;
    if (sc.controller_type == Scenario::ControllerType::ConstantSteering) {
      wheel_cmd = sc.constant_wheel_angle;
    } else {
      const RegionMap* clamp_regions = nullptr;
      RegionMap aware_regions;
      switch (sc.backing.limit_mode) {
        case LimitMode::SlipAware:
          aware_regions = region_map(p_now, slip);
          clamp_regions = &aware_regions;
          break;
        case LimitMode::SlipIgnorant:
          clamp_regions = have_fixed ? &fixed_regions : nullptr;
          break;
        case LimitMode::None:
          break;
      }
      // Odometric course of the trailer axle from the previous step.
      auto axle_now = trailer_axle(state, sc.params);
      double course = std::numeric_limits<double>::quiet_NaN();
      if (have_prev_axle) {
        double dx = axle_now[0] - prev_axle[0];
        double dy = axle_now[1] - prev_axle[1];
        if (dx * dx + dy * dy > 1e-12) course = std::atan2(dy, dx);
      }
      wheel_cmd = backing_controller(state, sc.path, sc.backing.gains, sc.v, sc.params, course,
                                     clamp_regions, sc.backing.margin, &memory, sc.dt);
      prev_axle = axle_now;
      have_prev_axle = true;
    }

    wheel = steering_actuator(wheel, wheel_cmd, sc.params, sc.dt);
    state.phi = wheel / sc.params.steering_ratio;
    double kappa = curvature_from_steering(state.phi, slip, sc.params.wheelbase);

    JackknifeLimitSet lims = jackknife_limits(p_now, slip);

    TrajectoryRow row;
    row.t = t;
    row.x = state.x;
    row.y = state.y;
    row.theta_v = state.theta_v;
    row.theta_t = wrap_angle(state.theta_v + state.psi);
    row.psi = state.psi;
    row.phi_wheel = wheel;
    row.kappa = kappa;
    row.slip = slip;
    for (int k = 0; k < 4; ++k) {
      const auto& l = lims.limits[static_cast<std::size_t>(k)];
      if (l.exists) row.limits[static_cast<std::size_t>(k)] = l.psi;
    }
    row.jackknife = is_jackknife_state(state.psi, p_now, slip);
    auto axle = trailer_axle(state, sc.params);
    row.lateral_error = sc.path.lateral_offset(axle[0], axle[1]);
    log.rows.push_back(row);

    if (i == steps) break;
    try {
      state = integrate_step(state, ControlInput::curvature(sc.v, kappa), sc.params, slip, sc.dt);
    } catch (const NumericError& err) {
      throw NumericError(std::string(err.what()) + " at step " + std::to_string(i));
    }
  }
  return log;
}

const char* TrajectoryLog::csv_header() {
  return "t,x,y,theta_v,theta_t,psi,phi_wheel,kappa,beta_f,beta_r,beta_t,"
         "psi_plus_kmax,psi_minus_kmax,psi_plus_kmin,psi_minus_kmin,jackknife,lateral_error";
}

namespace {

void put_num(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

}  // namespace

void TrajectoryLog::write_csv(std::ostream& os) const {
  os << csv_header() << "\n";
  for (const auto& r : rows) {
    put_num(os, r.t); os << ',';
    put_num(os, r.x); os << ',';
    put_num(os, r.y); os << ',';
    put_num(os, r.theta_v); os << ',';
    put_num(os, r.theta_t); os << ',';
    put_num(os, r.psi); os << ',';
    put_num(os, r.phi_wheel); os << ',';
    put_num(os, r.kappa); os << ',';
    put_num(os, r.slip.beta_f); os << ',';
    put_num(os, r.slip.beta_r); os << ',';
    put_num(os, r.slip.beta_t); os << ',';
    for (const auto& l : r.limits) {
      if (l) put_num(os, *l);
      os << ',';
    }
    os << (r.jackknife ? 1 : 0) << ',';
    put_num(os, r.lateral_error);
    os << '\n';
  }
}

namespace {

using nlohmann::json;

double jdeg(const json& j, const char* key, double fallback_deg) {
  return deg2rad(j.value(key, fallback_deg));
}

ExtCurvature parse_curvature(const json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return ExtCurvature::pos_inf();
    if (s == "-inf") return ExtCurvature::neg_inf();
    throw DomainError("curvature bound string must be 'inf', '+inf' or '-inf'");
  }
  return ExtCurvature::finite(j.get<double>());
}

VehicleTrailerParams params_from_json(const json& j) {
  VehicleTrailerParams p;
  p.wheelbase = j.value("wheelbase", 3.0);
  p.hitch_length = j.value("hitch_length", 1.23);
  p.tongue_length = j.value("tongue_length", 2.51);
  p.steering_ratio = j.value("steering_ratio", 0.0);
  p.steering_wheel_limit = jdeg(j, "steering_wheel_limit_deg", 0.0);
  // 400 deg/s unless the config overrides; 0 disables the rate limit
  p.steering_wheel_rate_limit = jdeg(j, "steering_wheel_rate_limit_deg_per_s", 400.0);

  bool explicit_kappa = j.contains("kappa_min") || j.contains("kappa_max");
  if (explicit_kappa) {
    if (j.contains("kappa_min")) p.kappa_min = parse_curvature(j.at("kappa_min"));
    if (j.contains("kappa_max")) p.kappa_max = parse_curvature(j.at("kappa_max"));
  } else if (p.has_steering()) {
    double phi_max = p.max_road_wheel_angle();
    if (!(phi_max < kPi / 2.0)) throw DomainError("road-wheel limit must be < pi/2");
    double k = std::tan(phi_max) / p.wheelbase;
    p.kappa_max = ExtCurvature::finite(k);
    p.kappa_min = ExtCurvature::finite(-k);
  }
  p.validate();
  return p;
}

SideslipState slip_from_json(const json& j) {
  SideslipState s;
  s.beta_f = jdeg(j, "beta_f_deg", 0.0);
  s.beta_r = jdeg(j, "beta_r_deg", 0.0);
  s.beta_t = jdeg(j, "beta_t_deg", 0.0);
  s.validate();
  return s;
}

Scenario scenario_from_json(const json& j) {
  Scenario sc;
  sc.name = j.value("name", "scenario");
  sc.params = params_from_json(j.at("params"));

  if (j.contains("initial")) {
    const json& i = j.at("initial");
    sc.initial.x = i.value("x", 0.0);
    sc.initial.y = i.value("y", 0.0);
    sc.initial.theta_v = jdeg(i, "heading_deg", 0.0);
    sc.initial.psi = wrap_angle(jdeg(i, "hitch_deg", 0.0));
    if (sc.params.steering_ratio > 0.0)
      sc.initial.phi = jdeg(i, "wheel_deg", 0.0) / sc.params.steering_ratio;
  }

  sc.v = j.value("v", -1.0);
  sc.duration = j.value("duration_s", 60.0);
  sc.dt = j.value("dt_s", 0.01);

  if (j.contains("slip")) {
    const json& s = j.at("slip");
    std::string type = s.value("type", "constant");
    if (type == "constant") {
      sc.slip_type = Scenario::SlipType::Constant;
      sc.slip_constant = slip_from_json(s);
    } else if (type == "terrain_cosine") {
      sc.slip_type = Scenario::SlipType::TerrainCosine;
      sc.slip_amplitude = deg2rad(s.value("amplitude_deg", 30.0));
    } else {
      throw DomainError("unknown slip schedule type: " + type);
    }
  }

  if (j.contains("controller")) {
    const json& c = j.at("controller");
    std::string type = c.value("type", "backing");
    if (type == "constant_steering") {
      sc.controller_type = Scenario::ControllerType::ConstantSteering;
      sc.constant_wheel_angle = jdeg(c, "wheel_deg", 0.0);
    } else if (type == "backing") {
      sc.controller_type = Scenario::ControllerType::Backing;
      std::string mode = c.value("limit_mode", "none");
      if (mode == "none") sc.backing.limit_mode = LimitMode::None;
      else if (mode == "slip_aware") sc.backing.limit_mode = LimitMode::SlipAware;
      else if (mode == "slip_ignorant") sc.backing.limit_mode = LimitMode::SlipIgnorant;
      else throw DomainError("unknown limit_mode: " + mode);
      sc.backing.margin = jdeg(c, "margin_deg", 15.0);
      if (c.contains("gains")) {
        const json& g = c.at("gains");
        sc.backing.gains.lateral = g.value("lateral", sc.backing.gains.lateral);
        sc.backing.gains.lateral_integral =
            g.value("lateral_integral", sc.backing.gains.lateral_integral);
        sc.backing.gains.heading = g.value("heading", sc.backing.gains.heading);
        sc.backing.gains.hitch = g.value("hitch", sc.backing.gains.hitch);
        if (g.contains("travel_heading_clamp_deg"))
          sc.backing.gains.travel_heading_clamp = deg2rad(g.at("travel_heading_clamp_deg").get<double>());
        if (g.contains("hitch_setpoint_clamp_deg"))
          sc.backing.gains.hitch_setpoint_clamp = deg2rad(g.at("hitch_setpoint_clamp_deg").get<double>());
        if (g.contains("integral_clamp_deg"))
          sc.backing.gains.integral_clamp = deg2rad(g.at("integral_clamp_deg").get<double>());
      }
    } else {
      throw DomainError("unknown controller type: " + type);
    }
  }

  if (j.contains("path")) {
    const json& pj = j.at("path");
    sc.path.x = pj.value("x", 0.0);
    sc.path.y = pj.value("y", 0.0);
    sc.path.heading = jdeg(pj, "heading_deg", 180.0);
  }

  sc.validate();
  return sc;
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  json j = json::parse(text);
  return scenario_from_json(j);
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Scenario load_scenario(const std::string& path) { return scenario_from_json_text(slurp(path)); }

AnalysisConfig analysis_config_from_json_text(const std::string& text) {
  json j = json::parse(text);
  AnalysisConfig cfg;
  cfg.params = params_from_json(j.at("params"));
  cfg.explicit_kappa = j.at("params").contains("kappa_min") || j.at("params").contains("kappa_max");
  if (j.contains("slip")) cfg.slip = slip_from_json(j.at("slip"));
  cfg.v = j.value("v", -1.0);
  if (cfg.v == 0.0) throw DomainError("v must be nonzero for safety labels");
  return cfg;
}

AnalysisConfig load_analysis_config(const std::string& path) {
  return analysis_config_from_json_text(slurp(path));
}

VehicleTrailerParams with_slip_adjusted_bounds(const VehicleTrailerParams& p,
                                               const SideslipState& slip) {
  VehicleTrailerParams out = p;
  auto [lo, hi] = achievable_curvature_bounds(p, slip);
  out.kappa_min = lo;
  out.kappa_max = hi;
  return out;
}

}  // namespace jackknife

#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jackknife/analysis.hpp"
#include "jackknife/kinematics.hpp"
#include "jackknife/types.hpp"

namespace jackknife {

/// Straight reference path: a point plus the direction of intended travel.
struct Path {
  double x = 0.0;
  double y = 0.0;
  double heading = kPi;  // travel direction, rad

  /// Signed offset of (px, py) from the path line, positive to the left of
  /// the travel direction.
  double lateral_offset(double px, double py) const;
};

struct ControllerGains {
  double lateral = 0.2;            // 1/m, lateral error -> travel-heading offset
  double lateral_integral = 0.02;  // 1/(m s), trims steady disturbance droop
  double heading = 1.2;            // trailer-heading error -> hitch setpoint
  double hitch = 0.6;              // 1/s, commanded hitch convergence rate
  double travel_heading_clamp = deg2rad(35.0);
  double hitch_setpoint_clamp = deg2rad(50.0);
  double integral_clamp = deg2rad(8.0);  // cap on the integral's heading trim
};

/// Per-run controller memory (the lateral-error integrator).
struct ControllerMemory {
  double lateral_integral = 0.0;
};

/// Which jackknife limits the backing controller respects when clamping its
/// hitch-angle setpoint. SlipAware recomputes them from the instantaneous
/// sideslip; SlipIgnorant uses the fixed zero-slip limits; None disables the
/// clamp entirely.
enum class LimitMode { None, SlipAware, SlipIgnorant };

struct BackingControllerConfig {
  ControllerGains gains;
  LimitMode limit_mode = LimitMode::None;
  double margin = deg2rad(15.0);
};

struct Scenario {
  enum class SlipType { Constant, TerrainCosine };
  enum class ControllerType { ConstantSteering, Backing };

  std::string name;
  VehicleTrailerParams params;
  SystemState initial;  // phi holds the initial road-wheel angle
  double v = -1.0;      // m/s, signed
  double duration = 60.0;
  double dt = 0.01;

  SlipType slip_type = SlipType::Constant;
  SideslipState slip_constant;
  double slip_amplitude = kPi / 6.0;

  ControllerType controller_type = ControllerType::Backing;
  double constant_wheel_angle = 0.0;  // rad, steering wheel target
  BackingControllerConfig backing;
  Path path;

  void validate() const;
};

/// One logged step: state, applied inputs, instantaneous slip, the four
/// jackknife limits under that slip (nullopt when nonexistent), the
/// jackknife classification, and the trailer-axle lateral error.
struct TrajectoryRow {
  double t = 0.0;
  double x = 0.0, y = 0.0;
  double theta_v = 0.0, theta_t = 0.0;
  double psi = 0.0;
  double phi_wheel = 0.0;
  double kappa = 0.0;
  SideslipState slip;
  std::array<std::optional<double>, 4> limits;  // indexed by LimitKind
  bool jackknife = false;
  double lateral_error = 0.0;
};

struct TrajectoryLog {
  std::vector<TrajectoryRow> rows;

  static const char* csv_header();
  void write_csv(std::ostream& os) const;
};

/// Trailer-axle position implied by the state.
std::array<double, 2> trailer_axle(const SystemState& state, const VehicleTrailerParams& p);

/// Classical fixed-step RK4 over the kinematic model with slip held constant
/// across the step; psi is re-wrapped afterwards. Throws NumericError when
/// any component leaves the finite range.
SystemState integrate_step(const SystemState& state, const ControlInput& u,
                           const VehicleTrailerParams& p, const SideslipState& slip, double dt);

/// Rate- and range-limited steering wheel: moves toward the command at most
/// steering_wheel_rate_limit * dt and saturates at +-steering_wheel_limit.
double steering_actuator(double current_wheel_angle, double commanded_wheel_angle,
                         const VehicleTrailerParams& p, double dt);

/// Terrain-locked sideslip: beta_F = A cos(theta_V + phi), beta_R =
/// A cos(theta_V), beta_T = A cos(theta_T).
SideslipState sideslip_schedule_terrain(double theta_v, double theta_t, double phi,
                                        double amplitude);

/// Cascaded backing/pushing control law: lateral error (plus a slow integral
/// trim) -> desired travel heading -> hitch-angle setpoint -> curvature
/// command (feedback linearization of the zero-slip hitch dynamics) ->
/// steering wheel angle. The law itself is slip-blind; sideslip awareness
/// enters only through the region map used to clamp the hitch setpoint
/// margin-deep inside the active non-jackknife region. axle_course is the
/// measured travel direction of the trailer axle (odometry); pass NaN to
/// fall back to the trailer heading. memory may be null for a stateless
/// (integral-free) evaluation.
double backing_controller(const SystemState& state, const Path& path, const ControllerGains& gains,
                          double v, const VehicleTrailerParams& p, double axle_course,
                          const RegionMap* regions, double margin, ControllerMemory* memory,
                          double dt);

/// Run the per-step pipeline: slip schedule -> controller -> actuator ->
/// curvature -> integrate -> recompute limits -> log.
TrajectoryLog run_scenario(const Scenario& scenario);

/// Scenario file I/O (JSON, angles in degrees, lengths in meters).
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text);

/// Static configuration for the analysis verbs: vehicle, one constant slip,
/// and the velocity sign used for safety labels. explicit_kappa records
/// whether the curvature bounds came from the config file directly (kept
/// fixed) or from the steering envelope (re-derived under slip).
struct AnalysisConfig {
  VehicleTrailerParams params;
  SideslipState slip;
  double v = -1.0;
  bool explicit_kappa = false;
};
AnalysisConfig load_analysis_config(const std::string& path);
AnalysisConfig analysis_config_from_json_text(const std::string& text);

/// Curvature bounds re-derived from the steering envelope under slip, for
/// car-like vehicles; other vehicles keep their stored bounds.
VehicleTrailerParams with_slip_adjusted_bounds(const VehicleTrailerParams& p,
                                               const SideslipState& slip);

}  // namespace jackknife

#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jackknife/types.hpp"

namespace jackknife {

/// One row of a sensor replay stream. SI units, radians; timestamps must be
/// strictly increasing.
struct SensorSample {
  double t = 0.0;
  double yaw_rate = 0.0;              // rad/s, IMU
  double speed = 0.0;                 // m/s, signed
  double hitch_angle = 0.0;           // rad
  double steering_wheel_angle = 0.0;  // rad
};

/// kappa = yaw_rate / speed. Throws LowSpeedError below the speed floor.
double curvature_from_yawrate(double yaw_rate, double speed, double speed_floor = 0.1);

/// Two-sided centered moving average with an odd window, truncated
/// symmetrically at the ends of the series.
std::vector<double> smooth(std::span<const double> series, int window = 9);

enum class EstimationMode { SlipPartial, SlipIgnorant };

/// Predicted jackknife limits at one sample time. The pair generated by the
/// sensed curvature fills the columns matching its sign; the other pair and
/// low-speed gaps stay empty.
struct LimitEstimate {
  double t = 0.0;
  bool valid = false;
  std::array<std::optional<double>, 4> psi;  // indexed by LimitKind
  double hitch_smoothed = 0.0;
};

/// Replay-based limit prediction. SlipPartial takes the curvature from the
/// measured yaw rate and speed (so the slip's effect on curvature is
/// included) but evaluates the limit formulas at zero slip; SlipIgnorant
/// derives curvature from the steering wheel angle with zero slip, the
/// traditional fixed estimate. Limit and hitch series are smoothed with the
/// given window.
std::vector<LimitEstimate> predict_limits_from_sensors(std::span<const SensorSample> stream,
                                                       const VehicleTrailerParams& p,
                                                       EstimationMode mode,
                                                       double speed_floor = 0.1,
                                                       int smoothing_window = 9);

/// Stream CSV I/O. Input header:
///   t,yaw_rate,speed,hitch_angle,steering_wheel_angle
/// Output header:
///   t,psi_plus_kmax,psi_minus_kmax,psi_plus_kmin,psi_minus_kmin,hitch_smoothed
std::vector<SensorSample> read_sensor_csv(std::istream& in);
void write_limit_estimates_csv(std::ostream& os, std::span<const LimitEstimate> estimates);
void write_sensor_csv(std::ostream& os, std::span<const SensorSample> stream);

}  // namespace jackknife

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "jackknife/angles.hpp"

namespace jackknife {

/// Input outside the mathematical domain of an operation.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A state or intermediate value became non-finite during integration.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Speed below the floor needed to infer curvature from yaw rate.
struct LowSpeedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Brute-force samples disagreed where they must not; indicates a bug.
struct InconclusiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Curvature extended with explicit +inf / -inf variants. A vehicle that can
/// turn in place (unicycle, skid-steer) has an infinite curvature limit, and
/// that limit has to order correctly against finite values.
class ExtCurvature {
 public:
  enum class Kind { Finite, PosInf, NegInf };

  constexpr ExtCurvature() = default;
  static constexpr ExtCurvature finite(double v) { return ExtCurvature(Kind::Finite, v); }
  static constexpr ExtCurvature pos_inf() { return ExtCurvature(Kind::PosInf, 0.0); }
  static constexpr ExtCurvature neg_inf() { return ExtCurvature(Kind::NegInf, 0.0); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_finite() const { return kind_ == Kind::Finite; }
  constexpr bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  constexpr bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  constexpr bool is_infinite() const { return kind_ != Kind::Finite; }

  /// Finite value; throws on the infinite variants.
  double value() const {
    if (!is_finite()) throw DomainError("ExtCurvature: value() on infinite curvature");
    return value_;
  }

  /// IEEE double view (+-inf for the infinite variants). Safe in comparisons.
  constexpr double as_double() const {
    if (kind_ == Kind::PosInf) return std::numeric_limits<double>::infinity();
    if (kind_ == Kind::NegInf) return -std::numeric_limits<double>::infinity();
    return value_;
  }

  friend constexpr bool operator<(ExtCurvature a, ExtCurvature b) { return a.as_double() < b.as_double(); }
  friend constexpr bool operator>(ExtCurvature a, ExtCurvature b) { return b < a; }
  friend constexpr bool operator<=(ExtCurvature a, ExtCurvature b) { return !(b < a); }
  friend constexpr bool operator>=(ExtCurvature a, ExtCurvature b) { return !(a < b); }
  friend constexpr bool operator==(ExtCurvature a, ExtCurvature b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
  }

 private:
  constexpr ExtCurvature(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_ = Kind::Finite;
  double value_ = 0.0;
};

/// Exogenous sideslip at the front wheel, rear wheel, and trailer wheel.
/// Angles are speed direction minus facing direction, in radians.
struct SideslipState {
  double beta_f = 0.0;
  double beta_r = 0.0;
  double beta_t = 0.0;

  void validate() const {
    for (double b : {beta_f, beta_r, beta_t}) {
      if (!(std::abs(b) <= kPi / 2.0)) throw DomainError("sideslip angle outside [-pi/2, pi/2]");
    }
  }
};

/// Geometry and actuation limits of a vehicle-trailer pair.
/// hitch_length is signed: positive for a rear hitch (trailer backing),
/// negative for a front-bumper hitch (trailer pushing).
struct VehicleTrailerParams {
  double wheelbase = 3.0;                  // L, m
  double hitch_length = 1.23;              // L1, m, signed
  double tongue_length = 2.51;             // L2, m, > 0
  double steering_ratio = 17.6;            // wheel angle / road-wheel angle
  double steering_wheel_limit = 0.0;       // rad, 0 disables the steering map
  double steering_wheel_rate_limit = 0.0;  // rad/s
  ExtCurvature kappa_min = ExtCurvature::neg_inf();
  ExtCurvature kappa_max = ExtCurvature::pos_inf();

  bool has_steering() const { return steering_ratio > 0.0 && steering_wheel_limit > 0.0; }

  double max_road_wheel_angle() const { return steering_wheel_limit / steering_ratio; }

  void validate() const {
    if (!(wheelbase > 0.0)) throw DomainError("wheelbase must be > 0");
    if (!(tongue_length > 0.0)) throw DomainError("tongue length must be > 0");
    if (!(kappa_min < kappa_max)) throw DomainError("kappa_min must be < kappa_max");
    if (steering_ratio < 0.0 || steering_wheel_limit < 0.0 || steering_wheel_rate_limit < 0.0)
      throw DomainError("steering parameters must be non-negative");
  }

  /// Car-like vehicle: curvature limits derived from the steering wheel
  /// envelope at zero slip, kappa = tan(phi_max)/L.
  static VehicleTrailerParams car_like(double wheelbase, double hitch_length, double tongue_length,
                                       double steering_ratio, double steering_wheel_limit,
                                       double steering_wheel_rate_limit) {
    VehicleTrailerParams p;
    p.wheelbase = wheelbase;
    p.hitch_length = hitch_length;
    p.tongue_length = tongue_length;
    p.steering_ratio = steering_ratio;
    p.steering_wheel_limit = steering_wheel_limit;
    p.steering_wheel_rate_limit = steering_wheel_rate_limit;
    double phi_max = steering_wheel_limit / steering_ratio;
    if (!(phi_max > 0.0 && phi_max < kPi / 2.0))
      throw DomainError("steering limit / ratio must give a road-wheel angle in (0, pi/2)");
    double k = std::tan(phi_max) / wheelbase;
    p.kappa_max = ExtCurvature::finite(k);
    p.kappa_min = ExtCurvature::finite(-k);
    p.validate();
    return p;
  }
};

/// Pose of the vehicle rear axle plus hitch angle and road-wheel steering
/// angle. psi is kept wrapped to (-pi, pi].
struct SystemState {
  double x = 0.0;
  double y = 0.0;
  double theta_v = 0.0;  // vehicle heading, rad (not wrapped)
  double psi = 0.0;      // hitch angle = trailer heading - vehicle heading
  double phi = 0.0;      // road-wheel steering angle, rad

  double theta_t() const { return wrap_angle(theta_v + psi); }
};

/// Speed plus either a curvature command or a heading-rate command. The
/// heading-rate form replaces every v*kappa product and is the one that
/// stays finite when a curvature limit is infinite.
struct ControlInput {
  enum class Mode { Curvature, HeadingRate };

  double v = 0.0;
  Mode mode = Mode::Curvature;
  double command = 0.0;  // kappa (1/m) or omega (rad/s)

  static ControlInput curvature(double v, double kappa) { return {v, Mode::Curvature, kappa}; }
  static ControlInput heading_rate(double v, double omega) { return {v, Mode::HeadingRate, omega}; }
};

}  // namespace jackknife

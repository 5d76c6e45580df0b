#include "jackknife/kinematics.hpp"

#include <cmath>

namespace jackknife {

namespace {

void require_cos_beta_t(const SideslipState& slip) {
  if (std::cos(slip.beta_t) == 0.0 || std::abs(slip.beta_t) >= kPi / 2.0)
    throw DomainError("trailer sideslip magnitude must be < pi/2");
}

}  // namespace

double curvature_from_steering(double phi, const SideslipState& slip, double wheelbase) {
  if (!(wheelbase > 0.0)) throw DomainError("wheelbase must be > 0");
  if (std::abs(slip.beta_r) >= kPi / 2.0) throw DomainError("|beta_R| must be < pi/2");
  double arg = phi + slip.beta_f;
  if (std::abs(arg) >= kPi / 2.0) throw DomainError("steering angle plus front slip reaches +-pi/2");
  return (std::tan(arg) * std::cos(slip.beta_r) - std::sin(slip.beta_r)) / wheelbase;
}

double steering_from_curvature(double kappa, const SideslipState& slip, double wheelbase) {
  if (!(wheelbase > 0.0)) throw DomainError("wheelbase must be > 0");
  double cr = std::cos(slip.beta_r);
  if (cr == 0.0) throw DomainError("|beta_R| must be < pi/2");
  return std::atan((wheelbase * kappa + std::sin(slip.beta_r)) / cr) - slip.beta_f;
}

std::pair<ExtCurvature, ExtCurvature> achievable_curvature_bounds(const VehicleTrailerParams& p,
                                                                  const SideslipState& slip) {
  if (!p.has_steering()) return {p.kappa_min, p.kappa_max};
  double phi_max = p.max_road_wheel_angle();
  // kappa is monotone in phi, so the interval endpoints come from the
  // road-wheel extremes. Slip pushing the tan argument past +-pi/2 makes
  // the corresponding bound unbounded.
  ExtCurvature lo, hi;
  if (-phi_max + slip.beta_f <= -kPi / 2.0)
    lo = ExtCurvature::neg_inf();
  else
    lo = ExtCurvature::finite(curvature_from_steering(-phi_max, slip, p.wheelbase));
  if (phi_max + slip.beta_f >= kPi / 2.0)
    hi = ExtCurvature::pos_inf();
  else
    hi = ExtCurvature::finite(curvature_from_steering(phi_max, slip, p.wheelbase));
  return {lo, hi};
}

HitchRateAffine hitch_rate_affine(double psi, const VehicleTrailerParams& p,
                                  const SideslipState& slip) {
  require_cos_beta_t(slip);
  double ct = std::cos(slip.beta_t);
  double denom = p.tongue_length * ct;
  HitchRateAffine a;
  a.kappa_coeff = 1.0 + p.hitch_length * std::cos(psi + slip.beta_t) / denom;
  a.offset = std::sin(psi - slip.beta_r + slip.beta_t) / denom;
  return a;
}

double hitch_rate(double kappa, double psi, double v, const VehicleTrailerParams& p,
                  const SideslipState& slip) {
  HitchRateAffine a = hitch_rate_affine(psi, p, slip);
  return -v * (kappa * a.kappa_coeff + a.offset);
}

StateRate state_derivative(const SystemState& state, const ControlInput& u,
                           const VehicleTrailerParams& p, const SideslipState& slip) {
  require_cos_beta_t(slip);
  StateRate r;
  r.x_dot = u.v * std::cos(state.theta_v + slip.beta_r);
  r.y_dot = u.v * std::sin(state.theta_v + slip.beta_r);
  HitchRateAffine a = hitch_rate_affine(state.psi, p, slip);
  if (u.mode == ControlInput::Mode::Curvature) {
    r.theta_v_dot = u.v * u.command;
    r.psi_dot = -u.v * (u.command * a.kappa_coeff + a.offset);
  } else {
    // omega replaces every v*kappa product
    r.theta_v_dot = u.command;
    r.psi_dot = -(u.command * a.kappa_coeff + u.v * a.offset);
  }
  return r;
}

}  // namespace jackknife

#pragma once

#include <utility>

#include "jackknife/types.hpp"

namespace jackknife {

/// Time derivative of the system state.
struct StateRate {
  double x_dot = 0.0;
  double y_dot = 0.0;
  double theta_v_dot = 0.0;
  double psi_dot = 0.0;
};

/// Vehicle curvature from the road-wheel steering angle with sideslip,
///   kappa = (tan(phi + beta_F) * cos(beta_R) - sin(beta_R)) / L.
/// Throws DomainError when the tan argument reaches +-pi/2 or |beta_R| >= pi/2.
double curvature_from_steering(double phi, const SideslipState& slip, double wheelbase);

/// Inverse of curvature_from_steering: the road-wheel angle realizing kappa
/// under the given slip. Always lands in the valid tan branch.
double steering_from_curvature(double kappa, const SideslipState& slip, double wheelbase);

/// Achievable curvature interval for a car-like vehicle under the current
/// slip: curvature_from_steering evaluated at the two road-wheel extremes.
/// Vehicles without a steering map keep their stored limits.
std::pair<ExtCurvature, ExtCurvature> achievable_curvature_bounds(const VehicleTrailerParams& p,
                                                                  const SideslipState& slip);

/// Continuous-time kinematics of the vehicle-trailer system with sideslip:
///   x_dot      = v cos(theta_V + beta_R)
///   y_dot      = v sin(theta_V + beta_R)
///   theta_V_dot = v kappa                      (or omega)
///   psi_dot    = -v (kappa + sin(psi - beta_R + beta_T) / (L2 cos beta_T)
///                        + L1 kappa cos(psi + beta_T) / (L2 cos beta_T))
/// With a heading-rate command every v*kappa product is replaced by omega.
StateRate state_derivative(const SystemState& state, const ControlInput& u,
                           const VehicleTrailerParams& p, const SideslipState& slip);

/// Hitch angle rate for a given curvature; the psi_dot component of
/// state_derivative.
double hitch_rate(double kappa, double psi, double v, const VehicleTrailerParams& p,
                  const SideslipState& slip);

/// Coefficients of the hitch rate seen as an affine function of curvature:
///   psi_dot = -v * (kappa * kappa_coeff + offset).
/// kappa_coeff vanishes exactly at the uncontrollable hitch angles.
struct HitchRateAffine {
  double kappa_coeff = 0.0;
  double offset = 0.0;
};
HitchRateAffine hitch_rate_affine(double psi, const VehicleTrailerParams& p,
                                  const SideslipState& slip);

}  // namespace jackknife

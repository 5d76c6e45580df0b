#pragma once

#include <random>
#include <vector>

#include "jackknife/types.hpp"

namespace jackknife {

/// Sampling parameters for the brute-force classifier. The oracle is the
/// slow, dumb cross-check: it samples the hitch rate over the achievable
/// curvature range instead of using any closed-form limit.
struct OracleConfig {
  int kappa_samples = 2001;
  double psi_resolution = 0.001;        // rad
  double bisection_tol = 1e-6;          // rad
  double infinite_kappa_surrogate = 1e6;  // 1/m, stands in for +-inf

  void validate() const {
    if (kappa_samples < 3) throw DomainError("kappa_samples must be >= 3");
    if (!(psi_resolution > 0.0 && bisection_tol > 0.0 && infinite_kappa_surrogate > 0.0))
      throw DomainError("oracle parameters must be positive");
  }
};

/// True iff the hitch rate keeps one sign (or stays zero) over every sampled
/// achievable curvature. A zero crossing is also checked on the affine-in-
/// kappa form so a root between samples is not missed.
bool oracle_is_jackknife(double psi, const VehicleTrailerParams& p, const SideslipState& slip,
                         const OracleConfig& cfg = {});

/// All boundary angles between jackknife and non-jackknife classification,
/// bisected to cfg.bisection_tol, plus interior critical hitch angles where
/// the frozen-hitch curvature touches a curvature bound tangentially without
/// flipping the classification. Sorted ascending in (-pi, pi].
std::vector<double> oracle_region_boundaries(const VehicleTrailerParams& p,
                                             const SideslipState& slip,
                                             const OracleConfig& cfg = {});

enum class OracleSafety { Safe, Unsafe };

/// Classify a region boundary by stepping into the adjacent jackknife region
/// and sampling which way the hitch angle moves there. Safe means motion
/// back toward the non-jackknife side. Throws InconclusiveError if sampled
/// signs disagree inside the jackknife region.
OracleSafety oracle_safety(double limit_angle, int v_sign, const VehicleTrailerParams& p,
                           const SideslipState& slip, const OracleConfig& cfg = {});

/// Seeded random vehicle-trailer configurations for oracle cross-checks.
/// Draws span all three trailer categories and both hitch signs, keep slip
/// magnitudes at least 0.05 rad away from pi/2, stay at least 1e-3 (in L2)
/// away from category boundaries, and keep the curvature bounds away from
/// exact tangency with the frozen-hitch curvature extrema.
struct RandomConfig {
  VehicleTrailerParams params;
  SideslipState slip;
};
RandomConfig random_vehicle_config(std::mt19937& rng);

}  // namespace jackknife

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "jackknife/kinematics.hpp"
#include "jackknife/types.hpp"

namespace jackknife {

enum class TrailerCategory { Short, Medium, Long };

std::string to_string(TrailerCategory c);

/// Category by tongue length relative to the slip-scaled hitch length:
///   Short  : L2 in (0, |L1 cos(beta_R) sec(beta_T)|]
///   Medium : L2 in (|L1 cos(beta_R) sec(beta_T)|, |L1 sec(beta_T)|]
///   Long   : L2 >  |L1 sec(beta_T)|
/// On-axle hitching (L1 = 0) is always Long.
TrailerCategory classify_trailer(const VehicleTrailerParams& p, const SideslipState& slip);

/// Hitch angles at which curvature cancels out of the hitch rate, so no
/// steering input can influence the hitch angle:
///   psi_inf^+- = +-acos(-L2 cos(beta_T) / L1) - beta_T.
/// Absent when |L2 cos(beta_T) / L1| > 1 (or L1 = 0).
struct UncontrollableAngles {
  double psi_plus;
  double psi_minus;
};
std::optional<UncontrollableAngles> uncontrollable_hitch_angles(const VehicleTrailerParams& p,
                                                                const SideslipState& slip);

/// Curvature that freezes the hitch angle,
///   kappa*(psi) = -sin(psi - beta_R + beta_T) / (L2 cos(beta_T) + L1 cos(psi + beta_T)).
/// Undefined (nullopt) at the uncontrollable hitch angles.
std::optional<double> critical_curvature(double psi, const VehicleTrailerParams& p,
                                         const SideslipState& slip);

/// d(kappa*)/d(psi) in closed form; undefined at the poles.
std::optional<double> critical_curvature_derivative(double psi, const VehicleTrailerParams& p,
                                                    const SideslipState& slip);

/// Stationary points of kappa*(psi). Exists for Medium and Long trailers;
/// Short trailers have no finite stationary points (DomainError). At the
/// Medium/Long boundary the degenerate branch is the appropriate one-sided
/// limit (infinite on one side, 1/(2 L1 sin beta_R) on the other).
struct CriticalCurvatureExtrema {
  double psi_at_max = 0.0;
  double psi_at_min = 0.0;
  ExtCurvature kappa_star_max;
  ExtCurvature kappa_star_min;
};
CriticalCurvatureExtrema critical_curvature_extrema(const VehicleTrailerParams& p,
                                                    const SideslipState& slip);

enum class LimitKind { PsiPlusKappaMax, PsiMinusKappaMax, PsiPlusKappaMin, PsiMinusKappaMin };
enum class LimitSafety { Unclassified, Safe, Unsafe, Atypical };

std::string to_string(LimitKind k);
std::string to_string(LimitSafety s);

/// One of the four jackknife limits. Each limit is generated by one of the
/// two achievable curvature bounds; it exists when the acos operand of
/// alpha_1 is real.
struct JackknifeLimit {
  LimitKind kind = LimitKind::PsiPlusKappaMax;
  ExtCurvature generating_kappa;
  bool exists = false;
  double psi = 0.0;    // wrapped to (-pi, pi]; meaningful only if exists
  bool typical = false;
  LimitSafety safety = LimitSafety::Unclassified;
};

struct JackknifeLimitSet {
  std::array<JackknifeLimit, 4> limits{};

  const JackknifeLimit& get(LimitKind k) const { return limits[static_cast<int>(k)]; }
  JackknifeLimit& get(LimitKind k) { return limits[static_cast<int>(k)]; }

  std::vector<JackknifeLimit> existing() const {
    std::vector<JackknifeLimit> out;
    for (const auto& l : limits)
      if (l.exists) out.push_back(l);
    return out;
  }
};

/// alpha helper terms used by the limit formulas and the cosine form of the
/// hitch rate. alpha1_operand may fall outside [-1, 1], in which case the
/// corresponding limits do not exist.
double alpha1_operand(double kappa, const VehicleTrailerParams& p, const SideslipState& slip);
double alpha2(double kappa, const VehicleTrailerParams& p, const SideslipState& slip);
double alpha3(double kappa, const VehicleTrailerParams& p, const SideslipState& slip);

/// Hitch rate in the cosine form,
///   psi_dot = -v alpha3 (cos(psi + beta_T - alpha2) - cos(alpha1)),
/// algebraically identical to the kinematic-model form.
double hitch_rate_cosine_form(double kappa, double psi, double v, const VehicleTrailerParams& p,
                              const SideslipState& slip);

/// The four slip-based critical hitch angles,
///   psi^+- = +-alpha1(kappa_lim) + alpha2(kappa_lim) - beta_T,
/// with the analytic limits substituted when a curvature bound is infinite.
JackknifeLimitSet jackknife_limits(const VehicleTrailerParams& p, const SideslipState& slip);

/// True iff psi is uncontrollable or kappa*(psi) is not achievable.
bool is_jackknife_state(double psi, const VehicleTrailerParams& p, const SideslipState& slip);

/// Partition of the hitch-angle circle into non-jackknife and jackknife
/// regions, with a subcase label (S-1/S-2, M-1..M-6 and primed mirrors for
/// front-bumper hitching, L-1..L-5).
struct RegionMap {
  std::string subcase;
  TrailerCategory category = TrailerCategory::Long;
  std::vector<CircularInterval> nonjackknife;
  std::vector<CircularInterval> jackknife;
  JackknifeLimitSet limits;

  bool all_nonjackknife() const {
    return nonjackknife.size() == 1 && nonjackknife.front().full;
  }
};
RegionMap region_map(const VehicleTrailerParams& p, const SideslipState& slip);

/// Safe / Unsafe per the velocity-sign rule for typical limits, or the
/// general hitch-rate sign test otherwise. Degenerate sign tests (zero rate
/// or no adjacent jackknife region on exactly one side) label Atypical.
LimitSafety classify_limit_safety(const JackknifeLimit& limit, int v_sign,
                                  const VehicleTrailerParams& p, const SideslipState& slip);

}  // namespace jackknife

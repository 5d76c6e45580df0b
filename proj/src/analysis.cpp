#include "jackknife/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace jackknife {

namespace {

constexpr double kAcosClampTol = 1e-12;  // acos operand slack treated as roundoff
constexpr double kSideProbe = 1e-7;      // offset used to probe region sides

void require_valid(const VehicleTrailerParams& p, const SideslipState& slip) {
  p.validate();
  if (std::abs(slip.beta_t) >= kPi / 2.0) throw DomainError("|beta_T| must be < pi/2");
  if (std::abs(slip.beta_r) >= kPi / 2.0) throw DomainError("|beta_R| must be < pi/2");
}

}  // namespace

std::string to_string(TrailerCategory c) {
  switch (c) {
    case TrailerCategory::Short: return "Short";
    case TrailerCategory::Medium: return "Medium";
    default: return "Long";
  }
}

std::string to_string(LimitKind k) {
  switch (k) {
    case LimitKind::PsiPlusKappaMax: return "psi_plus_kmax";
    case LimitKind::PsiMinusKappaMax: return "psi_minus_kmax";
    case LimitKind::PsiPlusKappaMin: return "psi_plus_kmin";
    default: return "psi_minus_kmin";
  }
}

std::string to_string(LimitSafety s) {
  switch (s) {
    case LimitSafety::Safe: return "safe";
    case LimitSafety::Unsafe: return "unsafe";
    case LimitSafety::Atypical: return "atypical";
    default: return "unclassified";
  }
}

TrailerCategory classify_trailer(const VehicleTrailerParams& p, const SideslipState& slip) {
  require_valid(p, slip);
  if (p.hitch_length == 0.0) return TrailerCategory::Long;
  double ct = std::cos(slip.beta_t);
  double short_bound = std::abs(p.hitch_length) * std::cos(slip.beta_r) / ct;
  double medium_bound = std::abs(p.hitch_length) / ct;
  if (p.tongue_length <= short_bound) return TrailerCategory::Short;
  if (p.tongue_length <= medium_bound) return TrailerCategory::Medium;
  return TrailerCategory::Long;
}

std::optional<UncontrollableAngles> uncontrollable_hitch_angles(const VehicleTrailerParams& p,
                                                                const SideslipState& slip) {
  require_valid(p, slip);
  if (p.hitch_length == 0.0) return std::nullopt;
  double op = -p.tongue_length * std::cos(slip.beta_t) / p.hitch_length;
  if (std::abs(op) > 1.0 + kAcosClampTol) return std::nullopt;
  double a = std::acos(std::clamp(op, -1.0, 1.0));
  return UncontrollableAngles{wrap_angle(a - slip.beta_t), wrap_angle(-a - slip.beta_t)};
}

std::optional<double> critical_curvature(double psi, const VehicleTrailerParams& p,
                                         const SideslipState& slip) {
  require_valid(p, slip);
  double ct = std::cos(slip.beta_t);
  double den = p.tongue_length * ct + p.hitch_length * std::cos(psi + slip.beta_t);
  if (den == 0.0) return std::nullopt;
  return -std::sin(psi - slip.beta_r + slip.beta_t) / den;
}

std::optional<double> critical_curvature_derivative(double psi, const VehicleTrailerParams& p,
                                                    const SideslipState& slip) {
  require_valid(p, slip);
  double ct = std::cos(slip.beta_t);
  double den = p.tongue_length * ct + p.hitch_length * std::cos(psi + slip.beta_t);
  if (den == 0.0) return std::nullopt;
  double num = p.tongue_length * std::cos(psi - slip.beta_r + slip.beta_t) * ct +
               p.hitch_length * std::cos(slip.beta_r);
  return -num / (den * den);
}

CriticalCurvatureExtrema critical_curvature_extrema(const VehicleTrailerParams& p,
                                                    const SideslipState& slip) {
  TrailerCategory cat = classify_trailer(p, slip);
  if (cat == TrailerCategory::Short)
    throw DomainError("kappa* has no finite stationary points for a Short trailer");

  double l1 = p.hitch_length;
  double l2ct = p.tongue_length * std::cos(slip.beta_t);
  double sr = std::sin(slip.beta_r);
  double cr = std::cos(slip.beta_r);

  CriticalCurvatureExtrema e;
  double psi_op = std::clamp(-l1 * cr / l2ct, -1.0, 1.0);
  double a = std::acos(psi_op);
  e.psi_at_max = wrap_angle(-a + slip.beta_r - slip.beta_t);
  e.psi_at_min = wrap_angle(+a + slip.beta_r - slip.beta_t);

  double den = l1 * l1 - l2ct * l2ct;
  double disc = l2ct * l2ct - l1 * l1 * cr * cr;
  double root = std::sqrt(std::max(disc, 0.0));

  // Medium/Long boundary L2 = |L1 sec(beta_T)|: one extremum degenerates to
  // the one-sided limit, the other follows from L'Hopital's rule.
  if (std::abs(den) <= 1e-12 * std::max(1.0, l1 * l1)) {
    if (l1 * sr == 0.0)
      throw DomainError("degenerate Medium boundary with zero rear sideslip");
    double finite = 1.0 / (2.0 * l1 * sr);
    if (l1 * sr > 0.0) {
      e.kappa_star_max = ExtCurvature::finite(finite);
      e.kappa_star_min = ExtCurvature::pos_inf();
    } else {
      e.kappa_star_max = ExtCurvature::neg_inf();
      e.kappa_star_min = ExtCurvature::finite(finite);
    }
    return e;
  }

  e.kappa_star_max = ExtCurvature::finite((l1 * sr - root) / den);
  e.kappa_star_min = ExtCurvature::finite((l1 * sr + root) / den);
  return e;
}

double alpha1_operand(double kappa, const VehicleTrailerParams& p, const SideslipState& slip) {
  double l1k = p.hitch_length * kappa;
  double rho = std::sqrt(l1k * l1k - 2.0 * std::sin(slip.beta_r) * l1k + 1.0);
  return -p.tongue_length * std::cos(slip.beta_t) * kappa / rho;
}

double alpha2(double kappa, const VehicleTrailerParams& p, const SideslipState& slip) {
  return std::atan2(std::cos(slip.beta_r), p.hitch_length * kappa - std::sin(slip.beta_r));
}

double alpha3(double kappa, const VehicleTrailerParams& p, const SideslipState& slip) {
  double l1k = p.hitch_length * kappa;
  double rho = std::sqrt(l1k * l1k + 1.0 - 2.0 * l1k * std::sin(slip.beta_r));
  return rho / (p.tongue_length * std::cos(slip.beta_t));
}

double hitch_rate_cosine_form(double kappa, double psi, double v, const VehicleTrailerParams& p,
                              const SideslipState& slip) {
  require_valid(p, slip);
  // cos(alpha1) is the raw operand so the identity holds even where alpha1
  // has no real value.
  double ca1 = alpha1_operand(kappa, p, slip);
  double a2 = alpha2(kappa, p, slip);
  double a3 = alpha3(kappa, p, slip);
  return -v * a3 * (std::cos(psi + slip.beta_t - a2) - ca1);
}

namespace {

// alpha terms for an extended curvature, taking the analytic limit when the
// bound is infinite: alpha1 -> acos(-+ L2 cos(beta_T)/|L1|), alpha2 -> 0 or pi.
struct AlphaPair {
  bool real = false;
  double a1 = 0.0;
  double a2 = 0.0;
};

AlphaPair alphas_at(ExtCurvature kappa, const VehicleTrailerParams& p, const SideslipState& slip) {
  AlphaPair out;
  double op;
  if (kappa.is_finite()) {
    op = alpha1_operand(kappa.value(), p, slip);
    if (std::abs(op) > 1.0 + kAcosClampTol) return out;
    out.a2 = alpha2(kappa.value(), p, slip);
  } else {
    if (p.hitch_length == 0.0) return out;
    double sgn = kappa.is_pos_inf() ? 1.0 : -1.0;
    op = -sgn * p.tongue_length * std::cos(slip.beta_t) / std::abs(p.hitch_length);
    if (std::abs(op) > 1.0 + kAcosClampTol) return out;
    out.a2 = (p.hitch_length * sgn > 0.0) ? 0.0 : kPi;
  }
  out.real = true;
  out.a1 = std::acos(std::clamp(op, -1.0, 1.0));
  return out;
}

JackknifeLimit make_limit(LimitKind kind, ExtCurvature kappa, const VehicleTrailerParams& p,
                          const SideslipState& slip) {
  JackknifeLimit l;
  l.kind = kind;
  l.generating_kappa = kappa;
  AlphaPair a = alphas_at(kappa, p, slip);
  if (!a.real) return l;
  bool plus = kind == LimitKind::PsiPlusKappaMax || kind == LimitKind::PsiPlusKappaMin;
  l.exists = true;
  l.psi = wrap_angle((plus ? a.a1 : -a.a1) + a.a2 - slip.beta_t);
  l.typical = a.a1 > 0.0 && a.a1 < kPi;
  if (l.typical) {
    if (auto unc = uncontrollable_hitch_angles(p, slip)) {
      if (std::abs(angle_diff(l.psi, unc->psi_plus)) < 1e-12 ||
          std::abs(angle_diff(l.psi, unc->psi_minus)) < 1e-12)
        l.typical = false;
    }
  }
  return l;
}

}  // namespace

JackknifeLimitSet jackknife_limits(const VehicleTrailerParams& p, const SideslipState& slip) {
  require_valid(p, slip);
  JackknifeLimitSet s;
  s.get(LimitKind::PsiPlusKappaMax) = make_limit(LimitKind::PsiPlusKappaMax, p.kappa_max, p, slip);
  s.get(LimitKind::PsiMinusKappaMax) = make_limit(LimitKind::PsiMinusKappaMax, p.kappa_max, p, slip);
  s.get(LimitKind::PsiPlusKappaMin) = make_limit(LimitKind::PsiPlusKappaMin, p.kappa_min, p, slip);
  s.get(LimitKind::PsiMinusKappaMin) = make_limit(LimitKind::PsiMinusKappaMin, p.kappa_min, p, slip);
  return s;
}

bool is_jackknife_state(double psi, const VehicleTrailerParams& p, const SideslipState& slip) {
  auto ks = critical_curvature(psi, p, slip);
  if (!ks) return true;  // uncontrollable hitch angle
  return !(*ks >= p.kappa_min.as_double() && *ks <= p.kappa_max.as_double());
}

namespace {

std::string subcase_label(TrailerCategory cat, const VehicleTrailerParams& p,
                          const SideslipState& slip) {
  if (cat == TrailerCategory::Short) return p.hitch_length > 0.0 ? "S-1" : "S-2";

  CriticalCurvatureExtrema e = critical_curvature_extrema(p, slip);
  double km = p.kappa_min.as_double();
  double kM = p.kappa_max.as_double();
  double sm = e.kappa_star_max.as_double();
  double sn = e.kappa_star_min.as_double();

  if (cat == TrailerCategory::Medium) {
    // kappa*_max < kappa*_min; the gap (sm, sn) is unreachable by kappa*.
    auto in_gap = [&](double k) { return k > sm && k < sn; };
    std::string label;
    if (kM >= sn && km >= sn) label = "M-1";
    else if (kM >= sn && in_gap(km)) label = "M-2";
    else if (kM >= sn && km <= sm) label = "M-3";
    else if (in_gap(kM) && in_gap(km)) label = "M-4";
    else if (in_gap(kM) && km <= sm) label = "M-5";
    else label = "M-6";
    if (p.hitch_length < 0.0) label += "'";
    return label;
  }

  // Long: kappa*_max > kappa*_min, kappa* covers [sn, sm].
  if (kM > sm && km < sn) return "L-1";
  if (kM > sm && km >= sn && km <= sm) return "L-2";
  if (kM >= sn && kM <= sm && km < sn) return "L-3";
  if (kM <= sm && km >= sn) return "L-4";
  return "L-5";
}

}  // namespace

RegionMap region_map(const VehicleTrailerParams& p, const SideslipState& slip) {
  RegionMap map;
  map.category = classify_trailer(p, slip);
  map.subcase = subcase_label(map.category, p, slip);
  map.limits = jackknife_limits(p, slip);

  // Boundary candidates are the existing limits, sorted on the circle. Each
  // gap between consecutive limits is uniformly jackknifing or not, so its
  // midpoint classifies it. This reproduces the per-subcase interval lists
  // and stays correct in near-degenerate arrangements where the listed
  // boundary order inverts after wrapping.
  std::vector<double> bounds;
  for (const auto& l : map.limits.limits)
    if (l.exists) bounds.push_back(l.psi);
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               bounds.end());

  if (bounds.empty()) {
    CircularInterval whole;
    whole.full = true;
    if (is_jackknife_state(0.0, p, slip))
      map.jackknife.push_back(whole);
    else
      map.nonjackknife.push_back(whole);
    return map;
  }

  for (std::size_t i = 0; i < bounds.size(); ++i) {
    double lo = bounds[i];
    double hi = bounds[(i + 1) % bounds.size()];
    double gap = hi - lo;
    if (gap <= 0.0) gap += kTwoPi;
    double mid = wrap_angle(lo + 0.5 * gap);
    CircularInterval iv{wrap_angle(lo), wrap_angle(hi), false};
    if (is_jackknife_state(mid, p, slip))
      map.jackknife.push_back(iv);
    else
      map.nonjackknife.push_back(iv);
  }
  return map;
}

namespace {

// Sign of the hitch rate at psi for an extended curvature, v = +-1. For an
// infinite curvature the kappa term dominates unless its coefficient is zero.
int hitch_rate_sign(ExtCurvature kappa, double psi, int v_sign, const VehicleTrailerParams& p,
                    const SideslipState& slip) {
  HitchRateAffine a = hitch_rate_affine(psi, p, slip);
  double rate;
  if (kappa.is_finite()) {
    rate = -v_sign * (kappa.value() * a.kappa_coeff + a.offset);
  } else if (a.kappa_coeff == 0.0) {
    rate = -v_sign * a.offset;
  } else {
    double inf_sign = kappa.is_pos_inf() ? 1.0 : -1.0;
    rate = -v_sign * inf_sign * a.kappa_coeff;
  }
  if (rate > 1e-12) return 1;
  if (rate < -1e-12) return -1;
  return 0;
}

}  // namespace

LimitSafety classify_limit_safety(const JackknifeLimit& limit, int v_sign,
                                  const VehicleTrailerParams& p, const SideslipState& slip) {
  if (!limit.exists) throw DomainError("cannot classify a nonexistent jackknife limit");
  if (v_sign == 0) throw DomainError("velocity sign must be +-1");

  if (limit.typical) {
    bool plus = limit.kind == LimitKind::PsiPlusKappaMax || limit.kind == LimitKind::PsiPlusKappaMin;
    if (plus) return v_sign < 0 ? LimitSafety::Safe : LimitSafety::Unsafe;
    return v_sign < 0 ? LimitSafety::Unsafe : LimitSafety::Safe;
  }

  // General sign test: evaluate the hitch rate at the limit under the other
  // curvature bound and compare against the side the non-jackknife region
  // is on.
  bool from_kmax = limit.kind == LimitKind::PsiPlusKappaMax || limit.kind == LimitKind::PsiMinusKappaMax;
  ExtCurvature other = from_kmax ? p.kappa_min : p.kappa_max;

  bool left_jk = is_jackknife_state(wrap_angle(limit.psi - kSideProbe), p, slip);
  bool right_jk = is_jackknife_state(wrap_angle(limit.psi + kSideProbe), p, slip);
  if (left_jk == right_jk) return LimitSafety::Atypical;

  int rate_sign = hitch_rate_sign(other, limit.psi, v_sign, p, slip);
  if (rate_sign == 0) return LimitSafety::Atypical;

  bool nonjackknife_on_positive_side = !right_jk;
  if (nonjackknife_on_positive_side)
    return rate_sign > 0 ? LimitSafety::Safe : LimitSafety::Unsafe;
  return rate_sign < 0 ? LimitSafety::Safe : LimitSafety::Unsafe;
}

}  // namespace jackknife

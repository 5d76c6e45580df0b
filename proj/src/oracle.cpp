#include "jackknife/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "jackknife/kinematics.hpp"

namespace jackknife {

namespace {

// Sampled achievable curvatures. Finite bounds get a uniform grid. An
// infinite bound is stood in for by the surrogate magnitude, with the tail
// beyond the finite core log-spaced so the huge values near the surrogate
// do not starve the moderate range of samples.
std::vector<double> curvature_samples(const VehicleTrailerParams& p, const OracleConfig& cfg) {
  double lo = p.kappa_min.is_finite() ? p.kappa_min.value() : -cfg.infinite_kappa_surrogate;
  double hi = p.kappa_max.is_finite() ? p.kappa_max.value() : cfg.infinite_kappa_surrogate;
  int n = cfg.kappa_samples;
  std::vector<double> ks;
  ks.reserve(static_cast<std::size_t>(n) + 2);

  if (p.kappa_min.is_finite() && p.kappa_max.is_finite()) {
    for (int i = 0; i < n; ++i) ks.push_back(lo + (hi - lo) * i / (n - 1));
    return ks;
  }

  double core = 10.0 * std::max({1.0, std::abs(p.kappa_min.is_finite() ? lo : 0.0),
                                 std::abs(p.kappa_max.is_finite() ? hi : 0.0)});
  double core_lo = std::max(lo, -core);
  double core_hi = std::min(hi, core);
  int n_core = n / 2;
  for (int i = 0; i < n_core; ++i) ks.push_back(core_lo + (core_hi - core_lo) * i / (n_core - 1));
  int n_tail = n - n_core;
  int tails = (p.kappa_min.is_finite() ? 0 : 1) + (p.kappa_max.is_finite() ? 0 : 1);
  int per_tail = n_tail / tails;
  if (!p.kappa_max.is_finite()) {
    double r = std::log(cfg.infinite_kappa_surrogate / core);
    for (int i = 1; i <= per_tail; ++i) ks.push_back(core * std::exp(r * i / per_tail));
  }
  if (!p.kappa_min.is_finite()) {
    double r = std::log(cfg.infinite_kappa_surrogate / core);
    for (int i = 1; i <= per_tail; ++i) ks.push_back(-core * std::exp(r * i / per_tail));
  }
  std::sort(ks.begin(), ks.end());
  return ks;
}

bool is_jackknife_sampled(double psi, const VehicleTrailerParams& p, const SideslipState& slip,
                          const std::vector<double>& ks, double kappa_lo, double kappa_hi) {
  // psi_dot = -v (kappa * c + f); the velocity sign cannot change whether
  // both signs are reachable, so sample kappa * c + f directly.
  HitchRateAffine a = hitch_rate_affine(psi, p, slip);
  bool pos = false, neg = false;
  for (double k : ks) {
    double r = k * a.kappa_coeff + a.offset;
    if (r > 0.0) pos = true;
    else if (r < 0.0) neg = true;
    if (pos && neg) return false;
  }
  // Second check on the affine form: a root between samples still means a
  // reachable sign change unless the kappa coefficient vanished.
  if (a.kappa_coeff != 0.0) {
    double root = -a.offset / a.kappa_coeff;
    if (root >= kappa_lo && root <= kappa_hi && (pos || neg)) return false;
  }
  return true;
}

struct OracleScratch {
  std::vector<double> ks;
  double lo = 0.0, hi = 0.0;

  OracleScratch(const VehicleTrailerParams& p, const OracleConfig& cfg) : ks(curvature_samples(p, cfg)) {
    lo = p.kappa_min.is_finite() ? p.kappa_min.value() : -cfg.infinite_kappa_surrogate;
    hi = p.kappa_max.is_finite() ? p.kappa_max.value() : cfg.infinite_kappa_surrogate;
  }

  bool jk(double psi, const VehicleTrailerParams& p, const SideslipState& slip) const {
    return is_jackknife_sampled(psi, p, slip, ks, lo, hi);
  }
};

// Curvature that zeroes the sampled hitch rate at psi via the affine solve;
// NaN when the coefficient vanishes.
double frozen_curvature(double psi, const VehicleTrailerParams& p, const SideslipState& slip) {
  HitchRateAffine a = hitch_rate_affine(psi, p, slip);
  if (a.kappa_coeff == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return -a.offset / a.kappa_coeff;
}

// Tangency points of the frozen-hitch curvature with a bound: local extrema
// of |frozen_curvature - bound| that touch zero without a sign change. The
// scan trigger allows for grid quantization (h grows quadratically away from
// a tangency); acceptance of the refined minimum is tight.
void tangency_boundaries(const VehicleTrailerParams& p, const SideslipState& slip,
                         const OracleConfig& cfg, double bound, std::vector<double>* out) {
  const double accept_tol = 1e-8 * std::max(1.0, std::abs(bound));
  int n = static_cast<int>(std::ceil(kTwoPi / cfg.psi_resolution));
  double prev_psi = -kPi + kTwoPi * 0.5 / n;
  double prev_h = frozen_curvature(prev_psi, p, slip) - bound;
  double prev_prev_h = prev_h;
  for (int i = 1; i < n; ++i) {
    double psi = -kPi + kTwoPi * (i + 0.5) / n;
    double h = frozen_curvature(psi, p, slip) - bound;
    if (std::isfinite(prev_h) && std::isfinite(h) && std::isfinite(prev_prev_h)) {
      double quantization = std::abs(prev_prev_h - 2.0 * prev_h + h);
      bool local_min = std::abs(prev_h) <= std::abs(prev_prev_h) && std::abs(prev_h) <= std::abs(h);
      if (local_min && prev_prev_h * h > 0.0 &&
          std::abs(prev_h) < std::max(accept_tol, 2.0 * quantization)) {
        double a = prev_psi - cfg.psi_resolution, b = prev_psi + cfg.psi_resolution;
        for (int it = 0; it < 100 && (b - a) > cfg.bisection_tol * 0.25; ++it) {
          double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
          double h1 = std::abs(frozen_curvature(m1, p, slip) - bound);
          double h2 = std::abs(frozen_curvature(m2, p, slip) - bound);
          if (h1 < h2) b = m2;
          else a = m1;
        }
        double at = 0.5 * (a + b);
        if (std::abs(frozen_curvature(at, p, slip) - bound) < accept_tol)
          out->push_back(wrap_angle(at));
      }
    }
    prev_prev_h = prev_h;
    prev_h = h;
    prev_psi = psi;
  }
}

// Transversal crossings of the frozen-hitch curvature with a bound. The
// plain flip scan misses non-jackknife slivers narrower than the psi grid
// (two limits from the two bounds almost coinciding); the crossing of each
// bound separately is still resolvable. Candidates are only kept when the
// sampled classification actually flips across them.
void crossing_boundaries(const VehicleTrailerParams& p, const SideslipState& slip,
                         const OracleConfig& cfg, const OracleScratch& s, double bound,
                         std::vector<double>* out) {
  int n = static_cast<int>(std::ceil(kTwoPi / cfg.psi_resolution));
  double prev_psi = -kPi;
  double prev_h = frozen_curvature(prev_psi, p, slip) - bound;
  for (int i = 1; i <= n; ++i) {
    double psi = -kPi + kTwoPi * static_cast<double>(i) / n;
    double h = frozen_curvature(psi, p, slip) - bound;
    if (std::isfinite(prev_h) && std::isfinite(h) && prev_h * h < 0.0) {
      double a = prev_psi, b = psi;
      bool prev_neg = prev_h < 0.0;
      for (int it = 0; it < 100 && (b - a) > cfg.bisection_tol * 0.25; ++it) {
        double m = 0.5 * (a + b);
        double hm = frozen_curvature(m, p, slip) - bound;
        ((hm < 0.0) == prev_neg ? a : b) = m;
      }
      double at = 0.5 * (a + b);
      double delta = std::max(cfg.bisection_tol, 1e-7);
      if (s.jk(wrap_angle(at - delta), p, slip) != s.jk(wrap_angle(at + delta), p, slip))
        out->push_back(wrap_angle(at));
    }
    prev_psi = psi;
    prev_h = h;
  }
}

// Isolated jackknife points where the curvature coefficient cancels: with an
// unbounded (surrogate) curvature range the neighbors of such a point stay
// classifiable while the point itself is not, so the flip scan cannot see
// it. Locate the cancellation by bisecting the coefficient's sign change and
// keep it when the point classifies jackknife between non-jackknife sides.
void isolated_point_boundaries(const VehicleTrailerParams& p, const SideslipState& slip,
                               const OracleConfig& cfg, const OracleScratch& s,
                               std::vector<double>* out) {
  auto coeff = [&](double psi) { return hitch_rate_affine(psi, p, slip).kappa_coeff; };
  int n = static_cast<int>(std::ceil(kTwoPi / cfg.psi_resolution));
  double prev_psi = -kPi;
  double prev_c = coeff(prev_psi);
  for (int i = 1; i <= n; ++i) {
    double psi = -kPi + kTwoPi * static_cast<double>(i) / n;
    double c = coeff(psi);
    if (prev_c == 0.0 || prev_c * c < 0.0) {
      double a = prev_psi, b = psi;
      for (int it = 0; it < 100 && (b - a) > 1e-14; ++it) {
        double m = 0.5 * (a + b);
        (coeff(m) * prev_c > 0.0 ? a : b) = m;
      }
      double at = 0.5 * (a + b);
      double off = std::max(2.0 * cfg.bisection_tol, 1e-5);
      if (s.jk(at, p, slip) && !s.jk(wrap_angle(at - off), p, slip) &&
          !s.jk(wrap_angle(at + off), p, slip))
        out->push_back(wrap_angle(at));
    }
    prev_psi = psi;
    prev_c = c;
  }
}

}  // namespace

bool oracle_is_jackknife(double psi, const VehicleTrailerParams& p, const SideslipState& slip,
                         const OracleConfig& cfg) {
  cfg.validate();
  p.validate();
  OracleScratch s(p, cfg);
  return s.jk(psi, p, slip);
}

std::vector<double> oracle_region_boundaries(const VehicleTrailerParams& p,
                                             const SideslipState& slip, const OracleConfig& cfg) {
  cfg.validate();
  p.validate();
  OracleScratch s(p, cfg);

  std::vector<double> bounds;
  int n = static_cast<int>(std::ceil(kTwoPi / cfg.psi_resolution));
  double start = -kPi + 1e-9;
  bool prev = s.jk(start, p, slip);
  double prev_psi = start;
  for (int i = 1; i <= n; ++i) {
    double psi = -kPi + kTwoPi * static_cast<double>(i) / n;
    bool cur = s.jk(psi, p, slip);
    if (cur != prev) {
      double a = prev_psi, b = psi;
      while (b - a > cfg.bisection_tol) {
        double m = 0.5 * (a + b);
        if (s.jk(m, p, slip) == prev) a = m;
        else b = m;
      }
      bounds.push_back(wrap_angle(0.5 * (a + b)));
      prev = cur;
    }
    prev_psi = psi;
  }

  if (p.kappa_min.is_finite()) {
    tangency_boundaries(p, slip, cfg, p.kappa_min.value(), &bounds);
    crossing_boundaries(p, slip, cfg, s, p.kappa_min.value(), &bounds);
  }
  if (p.kappa_max.is_finite()) {
    tangency_boundaries(p, slip, cfg, p.kappa_max.value(), &bounds);
    crossing_boundaries(p, slip, cfg, s, p.kappa_max.value(), &bounds);
  }
  isolated_point_boundaries(p, slip, cfg, s, &bounds);

  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end(),
                           [&](double a, double b) { return std::abs(a - b) < cfg.bisection_tol; }),
               bounds.end());
  return bounds;
}

OracleSafety oracle_safety(double limit_angle, int v_sign, const VehicleTrailerParams& p,
                           const SideslipState& slip, const OracleConfig& cfg) {
  cfg.validate();
  p.validate();
  if (v_sign == 0) throw DomainError("velocity sign must be +-1");
  OracleScratch s(p, cfg);

  const double probe = 1e-3;
  bool jk_above = s.jk(wrap_angle(limit_angle + probe), p, slip);
  bool jk_below = s.jk(wrap_angle(limit_angle - probe), p, slip);
  if (!jk_above && !jk_below)
    throw DomainError("limit is not adjacent to a jackknife region");
  // If both sides are jackknifing classify against the positive side.
  double side = jk_above ? 1.0 : -1.0;
  double psi_in = wrap_angle(limit_angle + side * probe);

  HitchRateAffine a = hitch_rate_affine(psi_in, p, slip);
  bool pos = false, neg = false;
  for (double k : s.ks) {
    double r = -static_cast<double>(v_sign) * (k * a.kappa_coeff + a.offset);
    if (r > 1e-15) pos = true;
    else if (r < -1e-15) neg = true;
  }
  if (pos && neg)
    throw InconclusiveError("hitch rate changes sign inside a jackknife region");

  // Motion back toward the limit (and the non-jackknife side) is negative
  // when the jackknife region sits on the positive side, and vice versa.
  bool toward = (side > 0.0) ? neg : pos;
  if (!pos && !neg) return OracleSafety::Unsafe;  // static hitch angle never recovers
  return toward ? OracleSafety::Safe : OracleSafety::Unsafe;
}

RandomConfig random_vehicle_config(std::mt19937& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto pick = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };
  const double beta_cap = kPi / 2.0 - 0.05;
  const double cat_margin = 1e-3;

  for (int attempt = 0; attempt < 1000; ++attempt) {
    RandomConfig c;
    int target = static_cast<int>(uni(rng) * 3.0);  // 0 Short, 1 Medium, 2 Long
    double sign = uni(rng) < 0.5 ? 1.0 : -1.0;
    c.params.wheelbase = pick(2.0, 4.0);
    c.params.hitch_length = sign * pick(0.3, 3.0);
    c.slip.beta_f = pick(-beta_cap, beta_cap);
    c.slip.beta_r = pick(-beta_cap, beta_cap);
    c.slip.beta_t = pick(-beta_cap, beta_cap);

    double ct = std::cos(c.slip.beta_t);
    double short_bound = std::abs(c.params.hitch_length) * std::cos(c.slip.beta_r) / ct;
    double medium_bound = std::abs(c.params.hitch_length) / ct;
    if (target == 0) {
      double hi = short_bound - cat_margin;
      if (hi <= 0.05) continue;
      c.params.tongue_length = pick(0.05, hi);
    } else if (target == 1) {
      double lo = short_bound + cat_margin, hi = medium_bound - cat_margin;
      if (hi <= lo) continue;
      c.params.tongue_length = pick(lo, hi);
    } else {
      c.params.tongue_length = pick(medium_bound + cat_margin, medium_bound + 5.0);
    }

    double kmax = pick(0.02, 4.0);
    double kmin = uni(rng) < 0.7 ? -kmax : pick(-4.0, kmax - 0.02);
    c.params.kappa_max = ExtCurvature::finite(kmax);
    c.params.kappa_min = ExtCurvature::finite(kmin);

    // Keep the bounds off exact tangency with the kappa* extrema so region
    // boundary sets stay clean for 1:1 comparison.
    if (target != 0) {
      double l1 = c.params.hitch_length;
      double l2ct = c.params.tongue_length * ct;
      double den = l1 * l1 - l2ct * l2ct;
      double disc = l2ct * l2ct - l1 * l1 * std::cos(c.slip.beta_r) * std::cos(c.slip.beta_r);
      if (std::abs(den) < 1e-6) continue;
      double root = std::sqrt(std::max(disc, 0.0));
      double e1 = (l1 * std::sin(c.slip.beta_r) - root) / den;
      double e2 = (l1 * std::sin(c.slip.beta_r) + root) / den;
      double gap = std::min(std::min(std::abs(kmax - e1), std::abs(kmax - e2)),
                            std::min(std::abs(kmin - e1), std::abs(kmin - e2)));
      if (gap < 5e-3) continue;
    }
    c.params.validate();
    return c;
  }
  throw NumericError("random config generation failed to converge");
}

}  // namespace jackknife

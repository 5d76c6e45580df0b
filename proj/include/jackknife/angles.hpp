#pragma once

#include <cmath>

namespace jackknife {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wrap an angle to (-pi, pi]. The result differs from the input by a
/// multiple of 2*pi; the lower boundary is open (-pi maps to +pi).
inline double wrap_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}

/// Shortest signed angular difference a - b, wrapped to (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

/// Closed interval [lo, hi] on the hitch-angle circle, endpoints in
/// (-pi, pi]. lo > hi means the interval wraps across +-pi. A full-circle
/// interval is flagged explicitly so it is not confused with an empty one.
struct CircularInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool full = false;

  bool wraps() const { return !full && lo > hi; }

  /// Arc length travelled counterclockwise from lo to hi.
  double width() const {
    if (full) return kTwoPi;
    double w = hi - lo;
    if (w < 0.0) w += kTwoPi;
    return w;
  }

  bool contains(double psi) const {
    if (full) return true;
    psi = wrap_angle(psi);
    if (!wraps()) return psi >= lo && psi <= hi;
    return psi >= lo || psi <= hi;
  }

  double midpoint() const {
    if (full) return 0.0;
    return wrap_angle(lo + 0.5 * width());
  }

  /// Clamp psi to [lo + margin, hi - margin], measured along the arc; points
  /// outside go to the nearest margin. If the margins overlap the interval
  /// midpoint is returned.
  double clamp_inside(double psi, double margin) const {
    if (full) return wrap_angle(psi);
    double w = width();
    if (2.0 * margin >= w) return midpoint();
    double half = 0.5 * w - margin;
    double off = wrap_angle(psi - midpoint());
    if (off > half) off = half;
    if (off < -half) off = -half;
    return wrap_angle(midpoint() + off);
  }
};

}  // namespace jackknife

#include "jackknife/estimation.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "jackknife/analysis.hpp"
#include "jackknife/kinematics.hpp"

namespace jackknife {

double curvature_from_yawrate(double yaw_rate, double speed, double speed_floor) {
  if (std::abs(speed) < speed_floor)
    throw LowSpeedError("speed below floor; curvature undefined");
  return yaw_rate / speed;
}

std::vector<double> smooth(std::span<const double> series, int window) {
  if (window < 1 || window % 2 == 0) throw DomainError("smoothing window must be odd");
  std::ptrdiff_t n = static_cast<std::ptrdiff_t>(series.size());
  std::vector<double> out(series.begin(), series.end());
  std::ptrdiff_t half = window / 2;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    std::ptrdiff_t h = std::min({half, i, n - 1 - i});
    double acc = 0.0;
    for (std::ptrdiff_t j = i - h; j <= i + h; ++j) acc += series[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc / static_cast<double>(2 * h + 1);
  }
  return out;
}

std::vector<LimitEstimate> predict_limits_from_sensors(std::span<const SensorSample> stream,
                                                       const VehicleTrailerParams& p,
                                                       EstimationMode mode, double speed_floor,
                                                       int smoothing_window) {
  if (stream.empty()) throw DomainError("sensor stream is empty");
  for (std::size_t i = 1; i < stream.size(); ++i)
    if (!(stream[i].t > stream[i - 1].t))
      throw DomainError("sensor timestamps must be strictly increasing");
  if (mode == EstimationMode::SlipIgnorant && !(p.steering_ratio > 0.0))
    throw DomainError("slip-ignorant prediction needs a steering ratio");

  const SideslipState zero_slip{};
  std::vector<LimitEstimate> out(stream.size());

  for (std::size_t i = 0; i < stream.size(); ++i) {
    const SensorSample& s = stream[i];
    LimitEstimate& est = out[i];
    est.t = s.t;

    double kappa;
    if (mode == EstimationMode::SlipPartial) {
      if (std::abs(s.speed) < speed_floor) continue;  // gap, stays empty-marked
      kappa = s.yaw_rate / s.speed;
    } else {
      double phi = s.steering_wheel_angle / p.steering_ratio;
      if (std::abs(phi) >= kPi / 2.0) continue;
      kappa = curvature_from_steering(phi, zero_slip, p.wheelbase);
    }

    // The sensed curvature acts as the achievable bound on its own side; the
    // limit pair it generates comes from the zero-slip limit formulas.
    VehicleTrailerParams pe = p;
    bool as_max = kappa >= 0.0;
    if (as_max) {
      pe.kappa_max = ExtCurvature::finite(kappa);
      pe.kappa_min = ExtCurvature::neg_inf();
    } else {
      pe.kappa_min = ExtCurvature::finite(kappa);
      pe.kappa_max = ExtCurvature::pos_inf();
    }
    JackknifeLimitSet lims = jackknife_limits(pe, zero_slip);
    auto kinds = as_max
                     ? std::array<LimitKind, 2>{LimitKind::PsiPlusKappaMax, LimitKind::PsiMinusKappaMax}
                     : std::array<LimitKind, 2>{LimitKind::PsiPlusKappaMin, LimitKind::PsiMinusKappaMin};
    bool any = false;
    for (LimitKind k : kinds) {
      const JackknifeLimit& l = lims.get(k);
      if (l.exists) {
        est.psi[static_cast<std::size_t>(k)] = l.psi;
        any = true;
      }
    }
    est.valid = any;
  }

  // Smooth each limit column over contiguous valid runs, and the hitch angle
  // over the whole stream.
  for (int col = 0; col < 4; ++col) {
    std::size_t i = 0;
    while (i < out.size()) {
      if (!out[i].psi[static_cast<std::size_t>(col)]) { ++i; continue; }
      std::size_t j = i;
      std::vector<double> run;
      while (j < out.size() && out[j].psi[static_cast<std::size_t>(col)]) {
        run.push_back(*out[j].psi[static_cast<std::size_t>(col)]);
        ++j;
      }
      std::vector<double> sm = smooth(run, smoothing_window);
      for (std::size_t k = i; k < j; ++k) out[k].psi[static_cast<std::size_t>(col)] = sm[k - i];
      i = j;
    }
  }

  std::vector<double> hitch(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) hitch[i] = stream[i].hitch_angle;
  std::vector<double> hs = smooth(hitch, smoothing_window);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].hitch_smoothed = hs[i];
  return out;
}

namespace {

void put_num(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

}  // namespace

std::vector<SensorSample> read_sensor_csv(std::istream& in) {
  std::vector<SensorSample> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) { header = false; continue; }
    std::stringstream ss(line);
    SensorSample s;
    char comma;
    ss >> s.t >> comma >> s.yaw_rate >> comma >> s.speed >> comma >> s.hitch_angle >> comma >>
        s.steering_wheel_angle;
    if (ss.fail()) throw DomainError("malformed sensor CSV line: " + line);
    out.push_back(s);
  }
  return out;
}

void write_sensor_csv(std::ostream& os, std::span<const SensorSample> stream) {
  os << "t,yaw_rate,speed,hitch_angle,steering_wheel_angle\n";
  for (const auto& s : stream) {
    put_num(os, s.t); os << ',';
    put_num(os, s.yaw_rate); os << ',';
    put_num(os, s.speed); os << ',';
    put_num(os, s.hitch_angle); os << ',';
    put_num(os, s.steering_wheel_angle); os << '\n';
  }
}

void write_limit_estimates_csv(std::ostream& os, std::span<const LimitEstimate> estimates) {
  os << "t,psi_plus_kmax,psi_minus_kmax,psi_plus_kmin,psi_minus_kmin,hitch_smoothed\n";
  for (const auto& e : estimates) {
    put_num(os, e.t); os << ',';
    for (const auto& l : e.psi) {
      if (l) put_num(os, *l);
      os << ',';
    }
    put_num(os, e.hitch_smoothed); os << '\n';
  }
}

}  // namespace jackknife

#include "cli_commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <vector>

#include "jackknife/analysis.hpp"
#include "jackknife/estimation.hpp"
#include "jackknife/oracle.hpp"
#include "jackknife/simulator.hpp"

namespace jackknife::cli {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  fs::path p = fs::path(dir) / name;
  std::ofstream os(p);
  if (!os) throw DomainError("cannot open output file: " + p.string());
  return os;
}

void put_num(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

std::string fmt_deg(double rad) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", rad2deg(rad));
  return buf;
}

std::string fmt_kappa(ExtCurvature k) {
  if (k.is_pos_inf()) return "+inf";
  if (k.is_neg_inf()) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", k.value());
  return buf;
}

VehicleTrailerParams effective_params(const AnalysisConfig& cfg) {
  return cfg.explicit_kappa ? cfg.params : with_slip_adjusted_bounds(cfg.params, cfg.slip);
}

}  // namespace

int cmd_limits(const CommonOpts& o) {
  AnalysisConfig cfg = load_analysis_config(o.config_path);
  int v_sign = cfg.v < 0.0 ? -1 : 1;
  VehicleTrailerParams p = effective_params(cfg);
  RegionMap map = region_map(p, cfg.slip);

  std::cout << "category: " << to_string(map.category) << "\n";
  std::cout << "subcase:  " << map.subcase << "\n";
  std::cout << "kappa bounds: [" << fmt_kappa(p.kappa_min) << ", " << fmt_kappa(p.kappa_max)
            << "] 1/m\n";

  if (auto unc = uncontrollable_hitch_angles(p, cfg.slip)) {
    std::cout << "uncontrollable hitch angles: " << fmt_deg(unc->psi_plus) << " deg, "
              << fmt_deg(unc->psi_minus) << " deg\n";
  } else {
    std::cout << "uncontrollable hitch angles: none\n";
  }
  if (map.category != TrailerCategory::Short) {
    CriticalCurvatureExtrema e = critical_curvature_extrema(p, cfg.slip);
    std::cout << "kappa* extrema: max " << fmt_kappa(e.kappa_star_max) << " at "
              << fmt_deg(e.psi_at_max) << " deg, min " << fmt_kappa(e.kappa_star_min) << " at "
              << fmt_deg(e.psi_at_min) << " deg\n";
  } else {
    std::cout << "kappa* extrema: none (Short trailer)\n";
  }

  bool any = false;
  std::cout << "limits (v " << (v_sign < 0 ? "< 0" : "> 0") << "):\n";
  for (auto& l : map.limits.limits) {
    std::cout << "  " << to_string(l.kind) << ": ";
    if (!l.exists) {
      std::cout << "does not exist\n";
      continue;
    }
    any = true;
    LimitSafety s = classify_limit_safety(l, v_sign, p, cfg.slip);
    std::cout << fmt_deg(l.psi) << " deg (kappa " << fmt_kappa(l.generating_kappa) << ", "
              << (l.typical ? "typical" : "not typical") << ", " << to_string(s) << ")\n";
  }
  if (!any) std::cout << "  no jackknife limit\n";

  if (!o.out_dir.empty()) {
    auto os = open_out(o.out_dir, "limits.csv");
    os << "kind,exists,psi_rad,generating_kappa,typical,safety\n";
    for (auto& l : map.limits.limits) {
      os << to_string(l.kind) << ',' << (l.exists ? 1 : 0) << ',';
      if (l.exists) put_num(os, l.psi);
      os << ',' << fmt_kappa(l.generating_kappa) << ',' << (l.typical ? 1 : 0) << ',';
      os << (l.exists ? to_string(classify_limit_safety(l, v_sign, p, cfg.slip)) : "") << '\n';
    }
  }
  return kExitOk;
}

int cmd_regions(const CommonOpts& o) {
  AnalysisConfig cfg = load_analysis_config(o.config_path);
  VehicleTrailerParams p = effective_params(cfg);
  RegionMap map = region_map(p, cfg.slip);

  std::cout << "category: " << to_string(map.category) << "  subcase: " << map.subcase << "\n";
  auto show = [&](const char* label, const std::vector<CircularInterval>& ivs) {
    std::cout << label << ":";
    if (ivs.empty()) std::cout << " none";
    for (const auto& iv : ivs) {
      if (iv.full)
        std::cout << " (full circle)";
      else
        std::cout << " [" << fmt_deg(iv.lo) << ", " << fmt_deg(iv.hi) << "]"
                  << (iv.wraps() ? " (wraps)" : "");
    }
    std::cout << "\n";
  };
  show("non-jackknife", map.nonjackknife);
  show("jackknife", map.jackknife);

  if (!o.out_dir.empty()) {
    auto os = open_out(o.out_dir, "regions.csv");
    os << "type,lo_rad,hi_rad,wraps,full\n";
    auto rows = [&](const char* t, const std::vector<CircularInterval>& ivs) {
      for (const auto& iv : ivs) {
        os << t << ',';
        if (!iv.full) put_num(os, iv.lo);
        os << ',';
        if (!iv.full) put_num(os, iv.hi);
        os << ',' << (iv.wraps() ? 1 : 0) << ',' << (iv.full ? 1 : 0) << '\n';
      }
    };
    rows("nonjackknife", map.nonjackknife);
    rows("jackknife", map.jackknife);
  }
  return kExitOk;
}

int cmd_simulate(const CommonOpts& o) {
  Scenario sc = load_scenario(o.config_path);
  TrajectoryLog log = run_scenario(sc);
  const TrajectoryRow& last = log.rows.back();
  std::cout << "scenario: " << sc.name << "\n";
  std::cout << "steps: " << log.rows.size() << " (dt " << sc.dt << " s)\n";
  std::cout << "final: psi " << fmt_deg(last.psi) << " deg, lateral error ";
  put_num(std::cout, last.lateral_error);
  std::cout << " m\n";
  bool ever_jk = false;
  for (const auto& r : log.rows) ever_jk = ever_jk || r.jackknife;
  std::cout << "jackknife state reached: " << (ever_jk ? "yes" : "no") << "\n";
  if (!o.out_dir.empty()) {
    auto os = open_out(o.out_dir, sc.name + "_trajectory.csv");
    log.write_csv(os);
  }
  return kExitOk;
}

int cmd_oracle_check(const CommonOpts& o) {
  std::mt19937 rng(o.seed);
  OracleConfig ocfg;
  int mismatches = 0;
  int per_category[3] = {0, 0, 0};

  for (int i = 0; i < o.count; ++i) {
    RandomConfig c = random_vehicle_config(rng);
    per_category[static_cast<int>(classify_trailer(c.params, c.slip))]++;

    RegionMap map = region_map(c.params, c.slip);
    std::vector<double> analytic;
    if (!map.all_nonjackknife())
      for (const auto& l : map.limits.limits)
        if (l.exists) analytic.push_back(l.psi);
    std::sort(analytic.begin(), analytic.end());
    analytic.erase(std::unique(analytic.begin(), analytic.end(),
                               [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                   analytic.end());

    std::vector<double> brute = oracle_region_boundaries(c.params, c.slip, ocfg);

    bool ok = analytic.size() == brute.size();
    if (ok)
      for (std::size_t k = 0; k < analytic.size(); ++k)
        ok = ok && std::abs(angle_diff(analytic[k], brute[k])) < 1e-5;

    if (ok) {
      for (const auto& l : map.limits.limits) {
        if (!l.exists || !l.typical) continue;
        LimitSafety a = classify_limit_safety(l, -1, c.params, c.slip);
        OracleSafety b = oracle_safety(l.psi, -1, c.params, c.slip, ocfg);
        if ((a == LimitSafety::Safe) != (b == OracleSafety::Safe)) ok = false;
      }
    }
    if (!ok) {
      ++mismatches;
      std::cout << "mismatch at config " << i << ": L1 " << c.params.hitch_length << " L2 "
                << c.params.tongue_length << "\n";
    }
  }

  std::cout << "configs checked: " << o.count << " (seed " << o.seed << ")\n";
  std::cout << "  short: " << per_category[0] << "  medium: " << per_category[1]
            << "  long: " << per_category[2] << "\n";
  std::cout << "mismatches: " << mismatches << "\n";
  return mismatches == 0 ? kExitOk : kExitNumeric;
}

int cmd_sweep(const CommonOpts& o) {
  AnalysisConfig cfg = load_analysis_config(o.config_path);
  int n = o.grid;
  if (n < 3) throw DomainError("grid must be >= 3");

  std::vector<double> axis(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    axis[static_cast<std::size_t>(i)] = -kPi / 2.0 + kPi * i / (n - 1);

  // psi+_kmax over the (beta_R, beta_T) grid; empty where undefined.
  std::vector<std::vector<std::optional<double>>> grid(
      static_cast<std::size_t>(n), std::vector<std::optional<double>>(static_cast<std::size_t>(n)));
  for (int r = 0; r < n; ++r) {
    for (int t = 0; t < n; ++t) {
      SideslipState slip = cfg.slip;
      slip.beta_r = axis[static_cast<std::size_t>(r)];
      slip.beta_t = axis[static_cast<std::size_t>(t)];
      try {
        VehicleTrailerParams p = cfg.explicit_kappa ? cfg.params
                                                    : with_slip_adjusted_bounds(cfg.params, slip);
        JackknifeLimitSet lims = jackknife_limits(p, slip);
        const JackknifeLimit& l = lims.get(LimitKind::PsiPlusKappaMax);
        if (l.exists) grid[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)] = l.psi;
      } catch (const DomainError&) {
        // cell stays empty
      }
    }
  }

  // Contour flatness: for a handful of levels, walk the rows, interpolate the
  // beta_T crossing per row, and measure the largest deviation from the
  // secant through the first and last crossing.
  double worst = 0.0;
  std::vector<std::array<double, 3>> flatness;  // level, points, max deviation
  std::vector<double> values;
  int c0 = n / 4, c1 = n - n / 4;
  for (int r = c0; r < c1; ++r)
    for (int t = c0; t < c1; ++t)
      if (grid[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)])
        values.push_back(*grid[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)]);
  if (!values.empty()) {
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    for (int li = 1; li <= 7; ++li) {
      double level = *mn + (*mx - *mn) * li / 8.0;
      std::vector<std::array<double, 2>> pts;  // (beta_R, beta_T at crossing)
      for (int r = c0; r < c1; ++r) {
        for (int t = c0; t + 1 < c1; ++t) {
          auto a = grid[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)];
          auto b = grid[static_cast<std::size_t>(r)][static_cast<std::size_t>(t + 1)];
          if (!a || !b) continue;
          if ((*a - level) * (*b - level) <= 0.0 && *a != *b) {
            double w = (level - *a) / (*b - *a);
            pts.push_back({axis[static_cast<std::size_t>(r)],
                           axis[static_cast<std::size_t>(t)] +
                               w * (axis[static_cast<std::size_t>(t + 1)] - axis[static_cast<std::size_t>(t)])});
            break;
          }
        }
      }
      if (pts.size() < 3) continue;
      double dev = 0.0;
      const auto& p0 = pts.front();
      const auto& p1 = pts.back();
      for (const auto& q : pts) {
        double span = p1[0] - p0[0];
        if (span == 0.0) continue;
        double lin = p0[1] + (q[0] - p0[0]) / span * (p1[1] - p0[1]);
        dev = std::max(dev, std::abs(q[1] - lin));
      }
      flatness.push_back({level, static_cast<double>(pts.size()), dev});
      worst = std::max(worst, dev);
    }
  }

  std::cout << "grid: " << n << " x " << n << " over beta_R x beta_T in [-90, 90] deg\n";
  std::cout << "max contour deviation from secant: " << fmt_deg(worst) << " deg\n";

  if (!o.out_dir.empty()) {
    auto os = open_out(o.out_dir, "sweep_psi_plus_kmax.csv");
    os << "beta_r_rad\\beta_t_rad";
    for (int t = 0; t < n; ++t) {
      os << ',';
      put_num(os, axis[static_cast<std::size_t>(t)]);
    }
    os << '\n';
    for (int r = 0; r < n; ++r) {
      put_num(os, axis[static_cast<std::size_t>(r)]);
      for (int t = 0; t < n; ++t) {
        os << ',';
        if (grid[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)])
          put_num(os, *grid[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)]);
      }
      os << '\n';
    }
    auto fo = open_out(o.out_dir, "sweep_contour_flatness.csv");
    fo << "level_rad,points,max_deviation_rad\n";
    for (const auto& f : flatness) {
      put_num(fo, f[0]); fo << ',' << static_cast<int>(f[1]) << ',';
      put_num(fo, f[2]); fo << '\n';
    }
  }
  return kExitOk;
}

int cmd_estimate(const CommonOpts& o) {
  AnalysisConfig cfg = load_analysis_config(o.config_path);
  std::ifstream in(o.input_path);
  if (!in) throw DomainError("cannot open sensor stream: " + o.input_path);
  std::vector<SensorSample> stream = read_sensor_csv(in);

  EstimationMode mode;
  if (o.mode == "slip_partial") mode = EstimationMode::SlipPartial;
  else if (o.mode == "slip_ignorant") mode = EstimationMode::SlipIgnorant;
  else throw DomainError("mode must be slip_partial or slip_ignorant");

  auto estimates = predict_limits_from_sensors(stream, cfg.params, mode);
  std::size_t valid = 0;
  for (const auto& e : estimates) valid += e.valid ? 1 : 0;
  std::cout << "samples: " << estimates.size() << ", with prediction: " << valid << "\n";

  if (!o.out_dir.empty()) {
    auto os = open_out(o.out_dir, std::string("estimate_") + o.mode + ".csv");
    write_limit_estimates_csv(os, estimates);
  }
  return kExitOk;
}

}  // namespace jackknife::cli

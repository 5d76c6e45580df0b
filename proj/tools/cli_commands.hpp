#pragma once

#include <optional>
#include <string>

namespace jackknife::cli {

// Exit codes: 0 success, 1 validation error, 2 numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumeric = 2;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;      // empty = no file output
  std::string input_path;   // estimate: sensor stream CSV
  std::string mode = "slip_partial";
  unsigned seed = 1;
  int count = 100;          // oracle-check configurations
  int grid = 41;            // sweep grid resolution per axis
  int v_sign = -1;          // limits: velocity sign for safety labels
};

int cmd_limits(const CommonOpts& o);
int cmd_regions(const CommonOpts& o);
int cmd_simulate(const CommonOpts& o);
int cmd_oracle_check(const CommonOpts& o);
int cmd_sweep(const CommonOpts& o);
int cmd_estimate(const CommonOpts& o);

}  // namespace jackknife::cli

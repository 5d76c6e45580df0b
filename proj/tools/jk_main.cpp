#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "cli_commands.hpp"
#include "jackknife/types.hpp"

int main(int argc, char** argv) {
  using namespace jackknife;
  using namespace jackknife::cli;

  CLI::App app{"jackknife limit analysis, simulation, and estimation for vehicle-trailer systems"};
  app.require_subcommand(1);

  CommonOpts opts;
  int (*handler)(const CommonOpts&) = nullptr;

  auto add_config = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("--config", opts.config_path, "configuration file (JSON)");
    if (required) opt->required();
  };
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", opts.out_dir, "output directory for CSV artifacts");
  };

  auto* limits = app.add_subcommand("limits", "jackknife limits, category, and safety labels");
  add_config(limits); add_out(limits);
  limits->callback([&] { handler = cmd_limits; });

  auto* regions = app.add_subcommand("regions", "non-jackknife / jackknife region map");
  add_config(regions); add_out(regions);
  regions->callback([&] { handler = cmd_regions; });

  auto* simulate = app.add_subcommand("simulate", "run a scenario and log the trajectory");
  add_config(simulate); add_out(simulate);
  simulate->callback([&] { handler = cmd_simulate; });

  auto* oracle = app.add_subcommand("oracle-check", "cross-check closed forms against brute force");
  oracle->add_option("--n", opts.count, "number of random configurations");
  oracle->add_option("--seed", opts.seed, "random seed");
  add_out(oracle);
  oracle->callback([&] { handler = cmd_oracle_check; });

  auto* sweep = app.add_subcommand("sweep", "psi+_kmax over a beta_R x beta_T grid");
  add_config(sweep); add_out(sweep);
  sweep->add_option("--grid", opts.grid, "grid points per axis");
  sweep->callback([&] { handler = cmd_sweep; });

  auto* estimate = app.add_subcommand("estimate", "predict limits from a sensor replay stream");
  add_config(estimate); add_out(estimate);
  estimate->add_option("--in", opts.input_path, "sensor stream CSV")->required();
  estimate->add_option("--mode", opts.mode, "slip_partial or slip_ignorant");
  estimate->callback([&] { handler = cmd_estimate; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    return handler(opts);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const InconclusiveError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

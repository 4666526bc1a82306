#include <CLI11.hpp>

#include "nsc/nsc.h"

int main(int argc, char** argv) {
  CLI::App app{"Event-capturing integrators for mechanical systems with unilateral contact"};
  app.require_subcommand(1);
  app.set_version_flag("--version", nsc_version());

  std::string config;
  std::string out;
  bool audit = false;
  auto* simulate = app.add_subcommand("simulate", "integrate one configuration and write trajectory.csv");
  simulate->add_option("config", config, "configuration file")->required();
  simulate->add_option("--out", out, "output directory (default run.output_dir)");
  simulate->add_flag("--audit", audit, "force the energy audit on");

  std::string grid;
  auto* sweep = app.add_subcommand("sweep", "run a parameter grid and write sweep.csv");
  sweep->add_option("config", config, "configuration file")->required();
  sweep->add_option("--grid", grid, "e.g. theta=0.3:1:8;e=0,0.5,1")->required();
  sweep->add_option("--out", out, "output directory");

  std::string h_list;
  auto* convergence = app.add_subcommand("convergence", "estimate the order of accuracy against a reference");
  convergence->add_option("config", config, "configuration file")->required();
  convergence->set_help_flag("--help", "print this help message and exit");
  convergence->add_option("--h", h_list, "comma separated step sizes, at least three")->required();
  convergence->add_option("--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  const char* out_dir = out.empty() ? nullptr : out.c_str();
  if (*simulate) return nsc_cmd_simulate(config.c_str(), out_dir, audit ? 1 : 0);
  if (*sweep) return nsc_cmd_sweep(config.c_str(), grid.c_str(), out_dir);
  return nsc_cmd_convergence(config.c_str(), h_list.c_str(), out_dir);
}

// Command-line laboratory for the kinetic traffic model: runs single
// scenarios, hydrodynamic-limit sweeps, Picard iteration traces, and
// cross-solver comparisons, writing CSV artifacts and a manifest per
// invocation.

#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "ktlab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"kinetic traffic model laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 12345;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file")->required();
    cmd->add_option("--out", out_dir, "output directory");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run one kinetic scenario");
  add_common(simulate);
  CLI::App* sweep = app.add_subcommand("sweep", "hydrodynamic-limit rate sweep over eps");
  add_common(sweep);
  CLI::App* picard = app.add_subcommand("picard", "Picard iteration contraction trace");
  add_common(picard);
  CLI::App* compare = app.add_subcommand("compare", "cross-solver agreement check");
  add_common(compare);
  compare->add_option("--seed", seed, "particle sampling seed");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) return ktlab::cmd_simulate(config_path, out_dir);
  if (sweep->parsed()) return ktlab::cmd_sweep(config_path, out_dir);
  if (picard->parsed()) return ktlab::cmd_picard(config_path, out_dir);
  if (compare->parsed()) return ktlab::cmd_compare(config_path, out_dir, seed);
  return ktlab::kExitConfig;
}

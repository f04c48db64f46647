// Command-line front end: load a scenario file, run one command against it,
// write the verdict document (and any side files) into the output directory.
//
// Exit codes: 0 = verdict computed (including "hypothesis fails" verdicts),
// 1 = invalid scenario or configuration, 2 = numerical failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eahm/errors.hpp"
#include "eahm/rundoc.hpp"
#include "eahm/version.hpp"

namespace {

struct CliArgs {
  std::string scenario_path;
  std::string out_dir = "eahm_out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid_points;
  bool quiet = false;
};

void add_common_options(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--scenario", args.scenario_path, "Scenario file (JSON)")
      ->required();
  cmd->add_option("--out", args.out_dir, "Output directory")
      ->capture_default_str();
  cmd->add_option("--seed", args.seed, "Override the scenario seed");
  cmd->add_option("--grid-points", args.grid_points,
                  "Override the number of x-grid points");
  cmd->add_flag("--quiet", args.quiet, "Suppress the run summary");
}

int run(eahm::Command command, const CliArgs& args) {
  eahm::Scenario scenario = eahm::load_scenario_file(args.scenario_path);
  eahm::RunOptions opt;
  opt.out_dir = args.out_dir;
  opt.quiet = args.quiet;
  opt.seed_override = args.seed;
  opt.grid_points_override = args.grid_points;

  eahm::RunResult res = eahm::run_command(command, scenario, opt);
  if (!args.quiet) {
    std::cout << res.summary << '\n';
    for (const auto& f : res.files_written)
      std::cout << "wrote " << f.string() << '\n';
    std::cout << "duration: " << res.duration_seconds << " s\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for additive-hazard lifetime models"};
  app.set_version_flag("--version", std::string(eahm::kVersion));
  app.require_subcommand(1);

  CliArgs args;
  CLI::App* eval = app.add_subcommand("eval", "Tabulate model curves to CSV");
  CLI::App* classify =
      app.add_subcommand("classify", "Aging classes and stochastic orders");
  CLI::App* verify = app.add_subcommand(
      "verify", "Check the DFR-to-DLR preservation statement");
  CLI::App* search =
      app.add_subcommand("search", "Randomized counterexample search");
  CLI::App* sample =
      app.add_subcommand("sample", "Draw lifetimes and cross-check the survival");
  for (CLI::App* cmd : {eval, classify, verify, search, sample})
    add_common_options(cmd, args);

  CLI11_PARSE(app, argc, argv);

  eahm::Command command = eahm::Command::Eval;
  if (classify->parsed()) command = eahm::Command::Classify;
  else if (verify->parsed()) command = eahm::Command::Verify;
  else if (search->parsed()) command = eahm::Command::Search;
  else if (sample->parsed()) command = eahm::Command::Sample;

  try {
    return run(command, args);
  } catch (const eahm::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 2;
  } catch (const eahm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

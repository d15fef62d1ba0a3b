// Command-line front end: predict, run, verify, sweep.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selection/commands.hpp"

namespace {

void add_common(CLI::App* cmd, selection::cli::Options& opts) {
  cmd->add_option("--scheme", opts.scheme, "Override run.scheme (exponential|direct)")
      ->check(CLI::IsMember({"exponential", "direct"}));
  cmd->add_option("--dt", opts.dt, "Override run.dt");
  cmd->add_option("--t-end", opts.t_end, "Override run.t_end");
  cmd->add_option("--sample-every", opts.sample_every, "Override run.sample_every");
  cmd->add_option("--out", opts.out, "Output directory (default $SELECTION_OUT_DIR or ./out)");
  cmd->add_flag("--quiet", opts.quiet, "Print only essential output");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = selection::cli;
  CLI::App app{"Simulator for nonlocal selection dynamics"};
  app.require_subcommand(1);

  cli::Options opts;
  std::string path;
  std::string parameter;
  std::vector<double> values;

  auto* predict = app.add_subcommand("predict", "Print the predicted limit and a priori corridor");
  predict->add_option("scenario", path, "Scenario file")->required();
  add_common(predict, opts);

  auto* run = app.add_subcommand("run", "Integrate a scenario and write CSV/JSON outputs");
  run->add_option("scenario", path, "Scenario file")->required();
  add_common(run, opts);

  auto* verify = app.add_subcommand("verify", "Run a scenario and check the long-time invariants");
  verify->add_option("scenario", path, "Scenario file")->required();
  add_common(verify, opts);

  auto* sweep = app.add_subcommand("sweep", "Convergence study over dt or n_cells");
  sweep->add_option("scenario", path, "Scenario file")->required();
  sweep->add_option("parameter", parameter, "dt or n_cells")->required();
  sweep->add_option("values", values, "Parameter values")->required();
  add_common(sweep, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kInputError;
  }

  if (*predict) return cli::cmd_predict(path, opts, std::cout, std::cerr);
  if (*run) return cli::cmd_run(path, opts, std::cout, std::cerr);
  if (*verify) return cli::cmd_verify(path, opts, std::cout, std::cerr);
  if (*sweep) return cli::cmd_sweep(path, parameter, values, opts, std::cout, std::cerr);
  return cli::kInputError;
}

#include <string>

#include <CLI11.hpp>

#include "barrier_mc/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"barrier-mc: Monte Carlo experiments for decorated random walks "
               "below barrier curves"};
  app.require_subcommand(1);

  std::string spec_path, csv_path, which;
  std::uint64_t seed = 0;
  int workers = 0;
  barrier_mc::RunOptions opt;

  CLI::App* run = app.add_subcommand("run", "run the experiments in a spec file");
  run->add_option("spec", spec_path, "experiment spec file")->required();
  CLI::Option* run_seed = run->add_option("--seed", seed, "master seed override");
  CLI::Option* run_workers = run->add_option("--workers", workers, "worker threads");
  run->add_flag("--plot", opt.plot, "write an SVG scaling plot per experiment");
  run->add_option("--out", opt.out_dir, "output directory (default .)");

  CLI::App* replay = app.add_subcommand("replay", "re-run a result CSV and verify it");
  replay->add_option("csv", csv_path, "result CSV produced by run/suite")->required();
  replay->add_option("spec", spec_path, "spec file the CSV came from")->required();

  CLI::App* suite = app.add_subcommand("suite", "run the bundled suites");
  suite->add_option("which", which, "unit, paper or all")->required();
  CLI::Option* suite_seed = suite->add_option("--seed", seed, "master seed override");
  CLI::Option* suite_workers = suite->add_option("--workers", workers, "worker threads");
  suite->add_option("--out", opt.out_dir, "output directory (default .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (run->parsed()) {
    if (run_seed->count() > 0) opt.seed_override = seed;
    if (run_workers->count() > 0) opt.workers_override = workers;
    return barrier_mc::cmd_run(spec_path, opt);
  }
  if (replay->parsed()) {
    return barrier_mc::cmd_replay(csv_path, spec_path);
  }
  if (suite->parsed()) {
    if (suite_seed->count() > 0) opt.seed_override = seed;
    if (suite_workers->count() > 0) opt.workers_override = workers;
    return barrier_mc::cmd_suite(which, opt);
  }
  return 2;
}

// gpe_cli: ground and excited states of the discretized GP energy.
//
//   gpe_cli solve --config run.cfg --out results/ [--trace] [--seed N]
//   gpe_cli refine | compare-init | convergence-study  (same flags, plus --threads N)

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "gpe/commands.hpp"
#include "gpe/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gross-Pitaevskii ground states by optimization on the unit sphere"};
  app.require_subcommand(1);

  std::string config_path;
  gpe::CommandOptions opts;
  long long seed = -1;
  auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value run description")->required();
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_flag("--trace", opts.trace, "write trace.csv with one row per iteration");
    sub->add_option("--seed", seed, "seed for the second-order probe")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", opts.threads, "workers for independent solves")
        ->check(CLI::PositiveNumber);
  };
  auto* solve = app.add_subcommand("solve", "run the configured solver");
  auto* refine = app.add_subcommand("refine", "cascadic multigrid solve");
  auto* compare = app.add_subcommand("compare-init", "energies for every compare.kinds entry");
  auto* study = app.add_subcommand("convergence-study", "error table over study.n meshes");
  for (auto* s : {solve, refine, compare, study}) add_flags(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : gpe::kConfigError;
  }

  try {
    gpe::RunConfig cfg = gpe::RunConfig::load(config_path);
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    int rc = 0;
    if (solve->parsed()) rc = gpe::solve_command(cfg, opts);
    if (refine->parsed()) rc = gpe::refine_command(cfg, opts);
    if (compare->parsed()) rc = gpe::compare_init_command(cfg, opts);
    if (study->parsed()) rc = gpe::convergence_study_command(cfg, opts);
    if (rc == gpe::kNotConverged) std::fprintf(stderr, "warning: iteration budget exhausted before convergence\n");
    return rc;
  } catch (const gpe::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return gpe::kConfigError;
  } catch (const gpe::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return gpe::kIoError;
  } catch (const gpe::StepFailure& e) {
    std::fprintf(stderr, "not converged: %s\n", e.what());
    return gpe::kNotConverged;
  } catch (const gpe::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return gpe::kNotConverged;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

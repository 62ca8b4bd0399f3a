#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scatsize/cli.hpp"
#include "scatsize/selftest.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  scatsize::CommandOptions opt;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config = true) {
  if (needs_config)
    cmd->add_option("--config", args.config_path, "Run configuration (JSON)")->required();
  cmd->add_option("--out", args.opt.out_dir, "Output directory (default: .)");
  cmd->add_option("--threads", args.opt.threads, "Worker threads (default: 1)");
  cmd->add_flag("--verbose", args.opt.verbose, "Progress notes on stderr");
}

int with_config(const CommonArgs& args,
                int (*fn)(const scatsize::RunConfig&, const scatsize::CommandOptions&,
                          std::ostream&)) {
  try {
    scatsize::RunConfig config = scatsize::load_config(args.config_path);
    return fn(config, args.opt, std::cerr);
  } catch (const scatsize::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return scatsize::kExitConfig;
  } catch (const scatsize::Error& e) {
    std::cerr << e.what() << "\n";
    return scatsize::kExitSolver;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scatterer size estimation from analytically continued far-field amplitudes"};
  app.require_subcommand(1);

  CommonArgs ladder_args, estimate_args, oracle_args, sweep_args, selftest_args;
  double perturb_mie = 0.0;

  CLI::App* ladder = app.add_subcommand("ladder", "Tabulate ln|A(beta(b), alpha)| over b grids");
  add_common(ladder, ladder_args);

  CLI::App* estimate =
      app.add_subcommand("estimate", "Fit support extents and widths from amplitude ladders");
  add_common(estimate, estimate_args);

  CLI::App* oracle =
      app.add_subcommand("oracle", "Tabulate the surface-integral growth oracle ln J(b)");
  add_common(oracle, oracle_args);

  CLI::App* sweep =
      app.add_subcommand("sweep", "Width estimates over a fan of directions in a plane");
  add_common(sweep, sweep_args);

  CLI::App* selftest = app.add_subcommand("selftest", "Run the embedded invariant suite");
  add_common(selftest, selftest_args, /*needs_config=*/false);
  selftest
      ->add_option("--perturb-mie", perturb_mie,
                   "Test hook: relative perturbation of one Mie coefficient")
      ->group("");  // hidden

  CLI11_PARSE(app, argc, argv);

  if (ladder->parsed()) return with_config(ladder_args, scatsize::cmd_ladder);
  if (estimate->parsed()) return with_config(estimate_args, scatsize::cmd_estimate);
  if (oracle->parsed()) return with_config(oracle_args, scatsize::cmd_oracle);
  if (sweep->parsed()) return with_config(sweep_args, scatsize::cmd_sweep);
  if (selftest->parsed())
    return scatsize::run_selftest_cli(scatsize::SelfTestOptions{perturb_mie}, std::cout);
  return scatsize::kExitConfig;
}

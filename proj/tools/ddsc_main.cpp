#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ddsc/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dynamic dual-signal curriculum: synthetic multi-device benchmark runner"};
  app.require_subcommand(1);

  ddsc::cli::Overrides overrides;
  std::string checkpoint_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", overrides.config_path, "config file (flat dotted keys)");
    cmd->add_option("--out", overrides.out_dir, "output directory");
    cmd->add_option("--strategies", overrides.strategies,
                    "comma list: ddsc,uniform,static_entropy,self_paced");
    cmd->add_option("--seeds", overrides.seeds, "seed count N (runs 1..N) or comma list");
    cmd->add_option("--epochs", overrides.epochs, "training epochs");
    cmd->add_option("--label-fraction", overrides.label_fraction,
                    "training label budget per cell, in (0,1]");
    cmd->add_option("--shift-strength", overrides.shift_strength,
                    "device transform magnitude");
    cmd->add_option("--checkpoints", overrides.checkpoints, "on|off");
  };

  CLI::App* run = app.add_subcommand("run", "run the benchmark and write results");
  add_common(run);
  CLI::App* validate =
      app.add_subcommand("validate", "validate config and print resolved values");
  add_common(validate);
  CLI::App* inspect = app.add_subcommand("inspect", "summarize a checkpoint file");
  inspect->add_option("checkpoint", checkpoint_path, "checkpoint path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (run->parsed()) return ddsc::cli::cmd_run(overrides, std::cout, std::cerr);
  if (validate->parsed()) return ddsc::cli::cmd_validate(overrides, std::cout, std::cerr);
  if (inspect->parsed()) return ddsc::cli::cmd_inspect(checkpoint_path, std::cout, std::cerr);
  return 2;
}

#pragma once

#include <iosfwd>
#include <string>

#include "ddsc/cli/config.hpp"

namespace ddsc::cli {

// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration.

// Resolves and validates the config, runs the benchmark, and writes the
// output directory: resolved_config.txt, curves.csv, summary.txt, and a
// checkpoints/ subdirectory when checkpoints are enabled. Refuses to write
// into a non-empty directory.
int cmd_run(const Overrides& overrides, std::ostream& out, std::ostream& err);

// Prints a human-readable summary of a checkpoint: epoch, next lambda,
// prototype norms, weight quantiles, and the top/bottom-weighted samples
// with their invariance and progress scores.
int cmd_inspect(const std::string& checkpoint_path, std::ostream& out, std::ostream& err);

// Validates without running and prints the resolved configuration, so the
// defaulted hyperparameters are always visible.
int cmd_validate(const Overrides& overrides, std::ostream& out, std::ostream& err);

}  // namespace ddsc::cli

#pragma once

#include "tumorfbs_app/config.hpp"

#include <iosfwd>

namespace tumorfbs::app {

enum ExitCode : int {
  exit_ok = 0,
  exit_bad_config = 1,
  exit_solver_failure = 2,
  exit_not_converged = 3,
};

/// Executes config.command, writing its files into config.output_dir.
/// Diagnostics and warnings go to `log`.
int run(const RunConfig &config, std::ostream &log);

/// One optimize run per point of the Cartesian product of the sweep lists
/// (an empty list keeps the base value). Runs go to output_dir/run_NNN and
/// are summarised in output_dir/index.csv. Per-run failures are recorded in
/// the index; the exit code is nonzero only with sweep_fail_on_error.
int sweep(const RunConfig &config, std::ostream &log);

} // namespace tumorfbs::app

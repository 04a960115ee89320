#pragma once

#include <iosfwd>

#include "simcov/cli/config.hpp"

namespace simcov::cli {

// Each command writes its files under config.out and returns 0 iff no
// diagnostics were recorded. Module errors propagate as simcov::Error.
int run_simulation_command(const RunConfig& config, std::ostream& log);
int run_backtest_command(const RunConfig& config, std::ostream& log);
int run_similarity_command(const RunConfig& config, std::ostream& log);

/// Dispatches on config.command; errors are reported on `log` and mapped to
/// exit status 1.
int run_command(const RunConfig& config, std::ostream& log);

}  // namespace simcov::cli

#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tlsloss/cli/config.hpp"

namespace tlsloss::cli {

// Exit status of every subcommand.
enum ExitCode : int { kExitOk = 0, kExitItemFailures = 1, kExitUsage = 2 };

// Results of one subcommand: per-item failures are collected, never thrown.
struct CommandOutcome {
  int failures = 0;
  std::vector<std::string> written;  // files, in writing order
};

// Each subcommand on an already resolved configuration. Schema problems throw
// SchemaError before any output is written; per-item problems are logged to
// `log` in input order and counted.
CommandOutcome cmd_fit_s21(const RunConfig& config, std::ostream& log);
CommandOutcome cmd_fit_loss(const RunConfig& config, std::ostream& log);
CommandOutcome cmd_thermometry(const RunConfig& config, std::ostream& log);
CommandOutcome cmd_ftir(const RunConfig& config, std::ostream& log);
CommandOutcome cmd_simulate(const RunConfig& config, std::ostream& log);

// Run `fn(i)` for i in [0, n) on up to `jobs` threads (0 = hardware).
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// Command-line entry point; `args` excludes the program name. Returns an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tlsloss::cli

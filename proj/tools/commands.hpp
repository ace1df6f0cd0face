#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "config.hpp"

namespace offshell::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitAllSingular = 3,
  kExitQuadrature = 4,
  kExitTrajectory = 5,
};

using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct CommandResult {
  Table table;
  int exit_code = kExitOk;
  /// Diagnostic for stderr (empty when none).
  std::string message;
};

std::string version();

/// Source set and metrics a command runs over, after defaults are filled in.
std::vector<int> effective_sigma5s(const RunConfig& cfg);
std::vector<Vec5> effective_sources(const RunConfig& cfg);
RunConfig with_default_grid(const RunConfig& cfg);

CommandResult cmd_regime(const RunConfig& cfg);
CommandResult cmd_field(const RunConfig& cfg);
CommandResult cmd_concat(const RunConfig& cfg);
CommandResult cmd_gf(const RunConfig& cfg);
CommandResult cmd_convolve(const RunConfig& cfg);
CommandResult cmd_trajectory(const RunConfig& cfg);
CommandResult cmd_residual(const RunConfig& cfg);

/// CSV (comment line, header, rows) or JSON ({"meta", "columns", "rows"}).
std::string render(const Table& table, const RunConfig& cfg);

/// Runs cfg.command; library errors are mapped onto exit codes.
CommandResult dispatch(const RunConfig& cfg);

/// Full command-line entry point: parses argv (and --config), runs, writes output.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace offshell::cli

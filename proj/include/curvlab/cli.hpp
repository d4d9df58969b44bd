#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace curvlab {

/// Options of one CLI invocation after parsing. Empty strings and empty vectors mean "not given".
struct RunConfig {
  std::string command;
  std::string geometry;   // catalog name
  std::string spec_path;  // geometry spec file
  int dim = 0;            // 0: the command's default
  std::vector<std::string> classes;
  std::uint64_t seed = 7;
  int count = 32;
  double threshold = 0.0;  // 0: module default
  int depth = 1;
  bool json = false;
  std::string out;
  // tensors
  std::vector<double> point;
  // construct
  std::string example = "gaussian";
  double k = 6.0;
  double eps = 1.0;
  double C = -5.0;
  double amplitude = 0.01;  // fraction of the equilibrium phi*
  int nodes = 0;            // 0: the command's default
  double step = 1e-3;
  std::string plot;         // prefix for two-column data files
  // obstruction
  std::string which;
};

/// Exit codes: 0 every verdict or identity passed, 1 something failed, 2 bad input or a module error.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitError = 2;

/// Result of running one command: the machine-readable report, its text rendering and the outcome.
struct CommandResult {
  nlohmann::json report;
  std::string text;
  bool passed = true;
};

/// Runs a parsed command. Module errors propagate as exceptions.
CommandResult run_command(const RunConfig& config);

/// Full front end: parses args (without the program name), runs, writes the report to `out` or
/// to --out, renders errors as structured diagnostics, and returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace curvlab

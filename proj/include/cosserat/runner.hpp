#pragma once

// Batch front-end: runs one analysis command against a RunConfig and emits a
// JSON report. Exit codes: 0 verdict computed (negative verdicts included),
// 2 inconclusive, 1 error.

#include <string>

#include "cosserat/config.hpp"

namespace cosserat {

struct RunResult {
  int exit_code = 1;
  std::string report_json;
  std::string csv; // obstruction grids; empty for other commands
};

// command: axioms | prolong | uniformity | homogeneity | symmetry | obstruction
RunResult run_command(const std::string& command, const RunConfig& cfg);

} // namespace cosserat

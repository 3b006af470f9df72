#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace semimarkov::cli {

enum ExitCode : int { kPass = 0, kToleranceFailure = 1, kUsageError = 2, kRuntimeError = 3 };

struct RunResult {
  int exit_code = kPass;
  std::vector<std::string> failures;  ///< one line per failed check, naming the pair / quantity
  std::vector<std::string> lines;     ///< human-readable summary
};

RunResult run_solve(const ExperimentConfig& cfg, const std::string& digest);
RunResult run_simulate(const ExperimentConfig& cfg, const std::string& digest);
RunResult run_compare(const ExperimentConfig& cfg, const std::string& digest);
RunResult run_diffusion(const ExperimentConfig& cfg, const std::string& digest);
RunResult run_aggregate(const ExperimentConfig& cfg, const std::string& digest);

/// `semimarkov <command> --config <path> [--out <prefix>] [--threads <n>]`.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace semimarkov::cli

#pragma once

#include <iosfwd>

#include "cli/config.hpp"

namespace compsupp::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kConstruction = 3, kVerification = 4 };

/// Each command writes its files under cfg.out and returns an exit code.
/// Construction failures and config errors propagate as exceptions; run()
/// maps them to codes.
int cmd_basis(const ExperimentConfig& cfg, std::ostream& log);
int cmd_support_operator(const ExperimentConfig& cfg, std::ostream& log);
int cmd_moment_operator(const ExperimentConfig& cfg, std::ostream& log);
int cmd_clt(const ExperimentConfig& cfg, std::ostream& log);

/// Validates, dispatches, and converts exceptions to exit codes (messages to err).
int run(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace compsupp::cli

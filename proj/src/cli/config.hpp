#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "compsupp/orlicz.hpp"
#include "compsupp/processes.hpp"

namespace compsupp::cli {

enum class Command { basis, support_operator, moment_operator, clt };

std::string to_string(Command c);

struct ExperimentConfig {
  Command command = Command::basis;
  GeneratorSpec generator;
  int depth = 8;
  std::size_t basis_size = 257;
  double tolerance = 1e-10;
  double q = 0.95;
  double target_decay = 0.25;
  YoungFunction phi = YoungFunction::power(2.0);
  std::optional<YoungFunction> psi;
  double slack = 0.10;
  std::vector<std::size_t> n_list;
  std::vector<double> t_grid;
  std::vector<std::size_t> convergence_n;
  std::size_t M_fit = 500;
  std::size_t M_holdout = 500;
  std::uint64_t seed_fit = 1;
  std::uint64_t seed_holdout = 2;
  std::size_t kernel_truncation = 64;
  std::size_t kernel_grid = 257;
  std::size_t apply_grid = 513;
  std::optional<std::filesystem::path> scheme_path;
  std::filesystem::path out = "out";
  std::size_t threads = 0;  // not part of the resolved config

  /// Everything that determines the outputs (threads excluded).
  nlohmann::json resolved() const;
  /// FNV-1a of resolved().dump().
  std::string digest() const;
};

ExperimentConfig defaults_for(Command c);

/// Applies a JSON config object on top of the command defaults. Unknown keys,
/// wrong types and out-of-range values throw ConfigError.
ExperimentConfig load_config(Command c, const nlohmann::json& j);

/// Checks cross-field invariants (seeds differ, counts positive, ...).
void validate(const ExperimentConfig& cfg);

}  // namespace compsupp::cli

#pragma once

#include <stdexcept>
#include <string>

namespace compsupp {

/// Argument outside the mathematical domain of an operation (t outside [0,1],
/// index out of range).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or degenerate input data.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical construction could not reach its target (e.g. Gram defect).
class ConstructionError : public std::runtime_error {
 public:
  ConstructionError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Invalid experiment configuration (CLI layer).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace compsupp

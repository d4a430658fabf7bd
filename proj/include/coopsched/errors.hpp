#pragma once

#include <stdexcept>
#include <string>

namespace coopsched {

// Exit codes of the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kIoFailure = 1,
  kValidationFailure = 2,
  kRuntimeInfeasible = 3,
};

/// An argument outside a model's mathematical domain (negative load, non-positive gain).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A slot whose communication latency leaves no time for computation.
class InfeasibleSlot : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration. The message names the offending field and constraint.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& constraint)
      : std::invalid_argument(field + ": " + constraint), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A policy asked for something the environment cannot provide (dead vehicle, double request).
class SchedulingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace coopsched

namespace coopsched {

/// File system failure; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coopsched

#pragma once

#include <stdexcept>
#include <string>

namespace oldb {

// Base of every error raised by the library. `code()` is a stable,
// machine-readable tag; the CLI forwards it verbatim in its JSON error line.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Shape or grid mismatch between inputs.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message) : Error("dimension_mismatch", message) {}
};

// Input that makes an operator ill-posed, e.g. a nonzero mean under Λ^{-1}.
class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& message)
      : Error("degenerate_input", message) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& message) : Error("invalid_parameter", message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("invalid_config", message) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("domain_error", message) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& message) : Error("precondition_failed", message) {}
};

class StepSizeError : public Error {
 public:
  explicit StepSizeError(const std::string& message) : Error("step_size", message) {}
};

class BlowUpError : public Error {
 public:
  BlowUpError(double time, const std::string& message)
      : Error("blow_up", message), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io_error", message) {}
};

}  // namespace oldb

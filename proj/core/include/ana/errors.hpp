#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ana {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (non-finite input,
/// probability outside (0,1), class label out of range).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration. Carries every violation found, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(message), violations_{message} {}
  explicit ConfigError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += "; ";
      out += item;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class StateError : public Error {
 public:
  using Error::Error;
};

/// PDF requested for a Dirac (β = 0) distribution.
class DegenerateDistributionError : public Error {
 public:
  using Error::Error;
};

/// Operation requires a noise family it was not given (e.g. inversion of a
/// regulariser that is not strictly increasing).
class UnsupportedFamilyError : public Error {
 public:
  using Error::Error;
};

}  // namespace ana

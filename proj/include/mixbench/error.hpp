#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mixbench {

enum class Errc {
  EmptySample,
  InvalidParams,
  DegenerateSeparation,
  ShapeError,
  InvalidClassifier,
  InvalidTolerance,
  TooFewSamples,
  DomainError,
  InvalidDimension,
  InvalidMatrix,
  PreconditionViolated,
  BudgetExceeded,
  ConstructionFailed,
  TooFewPoints,
  ConfigError,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

/// Every library failure is reported through this type; `code()` is the
/// machine-readable kind and `what()` names the violated condition.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) { throw Error(code, message); }

inline void require(bool condition, Errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace mixbench

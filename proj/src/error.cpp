#include "mixbench/error.hpp"

namespace mixbench {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::EmptySample: return "EmptySample";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::DegenerateSeparation: return "DegenerateSeparation";
    case Errc::ShapeError: return "ShapeError";
    case Errc::InvalidClassifier: return "InvalidClassifier";
    case Errc::InvalidTolerance: return "InvalidTolerance";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::DomainError: return "DomainError";
    case Errc::InvalidDimension: return "InvalidDimension";
    case Errc::InvalidMatrix: return "InvalidMatrix";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::ConstructionFailed: return "ConstructionFailed";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mixbench

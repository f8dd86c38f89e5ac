#include "nanoplate/error.hpp"

namespace nanoplate {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMaterial: return "invalid-material";
    case ErrorCode::SingularMaterial: return "singular-material";
    case ErrorCode::InvalidTensorSplit: return "invalid-tensor-split";
    case ErrorCode::MaterialNotConvex: return "material-not-convex";
    case ErrorCode::InsufficientDofs: return "insufficient-dofs";
    case ErrorCode::InvalidCoefficient: return "invalid-coefficient";
    case ErrorCode::LoadPlacement: return "load-placement";
    case ErrorCode::AssemblyBug: return "assembly-bug";
    case ErrorCode::NumericFailure: return "numeric";
    case ErrorCode::OutOfDomain: return "out-of-domain";
    case ErrorCode::EmptyRegion: return "empty-region";
    case ErrorCode::OrderTooHigh: return "order-too-high";
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::DegenerateSolution: return "degenerate-solution";
    case ErrorCode::InsufficientSamples: return "insufficient-samples";
    case ErrorCode::DegenerateData: return "degenerate-data";
    case ErrorCode::EmptyProbeSet: return "empty-probe-set";
    case ErrorCode::InvalidConfig: return "invalid-config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

bool Error::is_numeric() const noexcept {
  return code_ == ErrorCode::NumericFailure || code_ == ErrorCode::AssemblyBug ||
         code_ == ErrorCode::DegenerateSolution || code_ == ErrorCode::DegenerateData;
}

}  // namespace nanoplate

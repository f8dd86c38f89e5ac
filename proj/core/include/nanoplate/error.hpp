#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nanoplate {

enum class ErrorCode {
  InvalidMaterial,
  SingularMaterial,
  InvalidTensorSplit,
  MaterialNotConvex,
  InsufficientDofs,
  InvalidCoefficient,
  LoadPlacement,
  AssemblyBug,
  NumericFailure,
  OutOfDomain,
  EmptyRegion,
  OrderTooHigh,
  InvalidParameter,
  DegenerateSolution,
  InsufficientSamples,
  DegenerateData,
  EmptyProbeSet,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
/// Numeric failures (NumericFailure, AssemblyBug, DegenerateSolution) are
/// distinguished from validation failures so the CLI can map them to
/// different exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] bool is_numeric() const noexcept;
  /// Message without the code prefix.
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

#define NANOPLATE_THROW_IF(cond, code, msg)              \
  do {                                                   \
    if (cond) throw ::nanoplate::Error((code), (msg));   \
  } while (false)

}  // namespace nanoplate

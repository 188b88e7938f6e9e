#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace demoedit {

enum class ErrorCode {
  DegenerateRotation6D,
  DegenerateGeometry,
  InvalidDepth,
  BehindCamera,
  EmptyCloud,
  TooFewCorrespondences,
  ConfigLengthMismatch,
  OutOfRange,
  DimensionMismatch,
  FrameInvalid,
  DemoInvalid,
  IoError,
  SchemaError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace demoedit

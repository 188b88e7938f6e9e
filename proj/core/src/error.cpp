#include "demoedit/error.hpp"

namespace demoedit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateRotation6D: return "DegenerateRotation6D";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::InvalidDepth: return "InvalidDepth";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::TooFewCorrespondences: return "TooFewCorrespondences";
    case ErrorCode::ConfigLengthMismatch: return "ConfigLengthMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::FrameInvalid: return "FrameInvalid";
    case ErrorCode::DemoInvalid: return "DemoInvalid";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace demoedit

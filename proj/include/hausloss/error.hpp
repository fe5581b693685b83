#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hausloss {

enum class ErrorCode {
  InvalidArgument,
  ShapeMismatch,
  EmptyMask,
  EmptyBoundary,
  EmptySourceSet,
  KOutOfRange,
  BothEmpty,
  ThresholdFlip,
  DegenerateBatch,
  GenerationFailed,
  Divergence,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::EmptyBoundary: return "EmptyBoundary";
    case ErrorCode::EmptySourceSet: return "EmptySourceSet";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::BothEmpty: return "BothEmpty";
    case ErrorCode::ThresholdFlip: return "ThresholdFlip";
    case ErrorCode::DegenerateBatch: return "DegenerateBatch";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI's JSON error object) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace hausloss

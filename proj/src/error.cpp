#include "ganterp/error.hpp"

namespace ganterp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kEmptyAudio: return "EmptyAudio";
    case ErrorCode::kAudioTooShort: return "AudioTooShort";
    case ErrorCode::kInvalidCategory: return "InvalidCategory";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kMisalignedInputs: return "MisalignedInputs";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kMalformedTrajectory: return "MalformedTrajectory";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kEncoderFailed: return "EncoderFailed";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) { return 10 + static_cast<int>(code); }

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code), message_(message) {
  refresh();
}

void Error::set_stage(std::string stage) {
  stage_ = std::move(stage);
  refresh();
}

void Error::refresh() {
  what_.clear();
  if (!stage_.empty()) what_ += "[" + stage_ + "] ";
  what_ += std::string(to_string(code_)) + ": " + message_;
  static_cast<std::runtime_error&>(*this) = std::runtime_error(what_);
}

TrajectoryError::TrajectoryError(std::string field, const std::string& message)
    : Error(ErrorCode::kMalformedTrajectory, field + ": " + message),
      field_(std::move(field)) {}

}  // namespace ganterp

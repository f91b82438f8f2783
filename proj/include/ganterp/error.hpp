#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ganterp {

enum class ErrorCode {
  kInvalidArgument,
  kFileNotFound,
  kUnsupportedFormat,
  kEmptyAudio,
  kAudioTooShort,
  kInvalidCategory,
  kIndexOutOfRange,
  kMisalignedInputs,
  kDimensionMismatch,
  kBackendUnavailable,
  kMalformedTrajectory,
  kVersionMismatch,
  kIoError,
  kEncoderFailed,
};

std::string_view to_string(ErrorCode code);

// Process exit status used by the CLI for each error class. Distinct and
// stable; 0 is success, 1 an unexpected failure, 2 a command-line usage error.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

  // Pipeline stage that raised the error, empty when raised outside run_pipeline.
  const std::string& stage() const noexcept { return stage_; }
  void set_stage(std::string stage);

 private:
  void refresh();

  ErrorCode code_;
  std::string message_;
  std::string stage_;
  std::string what_;
};

// Schema violation in a trajectory document. field() is a JSON-path-like
// locator such as "frames[3].class_weights".
class TrajectoryError : public Error {
 public:
  TrajectoryError(std::string field, const std::string& message);

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace ganterp

#pragma once

#include <stdexcept>
#include <string>

namespace galign {

enum class ErrorCode {
  InvalidArgument,  // malformed request or option
  NotFound,         // reference to an id that does not exist
  InvalidModel,     // model fails validation
  Unsupported,      // operation not defined for this input
  Io,
};

// Thrown by operations whose preconditions fail. The `subject` is the node,
// link, or group id the failure is about, when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string subject = {})
      : std::runtime_error(std::move(message)), code_(code), subject_(std::move(subject)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

const char* to_string(ErrorCode code);

}  // namespace galign

#pragma once

#include <stdexcept>
#include <string>

namespace leadrisk {

// Broad failure categories. The CLI maps each one onto a process exit code.
enum class ErrorKind {
  kInvalidArgument,
  kConfig,
  kParse,
  kData,
  kModelCompat,
  kInternal,
  kMissingArtifact,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void Require(bool condition, const std::string& message,
                    ErrorKind kind = ErrorKind::kInvalidArgument) {
  if (!condition) throw Error(kind, message);
}

}  // namespace leadrisk

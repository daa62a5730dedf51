#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace geoscale {

// Broad failure classes, mirrored by the CLI exit codes (io=2,
// validation=3, numerical=4).
enum class ErrorKind { io, validation, numerical };

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::io: return "io";
    case ErrorKind::validation: return "validation";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

// Every throw site names a stable machine-readable code ("ClipTooShort",
// "OutOfDomain", ...) plus a human message and optional context string.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message,
        std::string context = {})
      : std::runtime_error(code + ": " + message),
        kind_(kind),
        code_(std::move(code)),
        context_(std::move(context)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& code() const { return code_; }
  const std::string& context() const { return context_; }

  static Error io(std::string code, const std::string& message,
                  std::string context = {}) {
    return Error(ErrorKind::io, std::move(code), message, std::move(context));
  }
  static Error validation(std::string code, const std::string& message,
                          std::string context = {}) {
    return Error(ErrorKind::validation, std::move(code), message,
                 std::move(context));
  }
  static Error numerical(std::string code, const std::string& message,
                         std::string context = {}) {
    return Error(ErrorKind::numerical, std::move(code), message,
                 std::move(context));
  }

 private:
  ErrorKind kind_;
  std::string code_;
  std::string context_;
};

}  // namespace geoscale

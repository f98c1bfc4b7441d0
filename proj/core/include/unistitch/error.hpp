#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace unistitch {

enum class ErrorCode {
  InvalidConfig,
  InvalidArgument,
  DegenerateHomography,
  NoOverlap,
  BackendUnavailable,
  BackendShapeMismatch,
  NonFiniteLatent,
  UnsupportedFormat,
  CorruptFile,
  Io,
  TileTooSmall,
  ZeroVector,
  ProviderError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Parses the wire-level code name ("BackendShapeMismatch", ...). Unknown
/// names map to ProviderError.
ErrorCode error_code_from_string(std::string_view name) noexcept;

/// Single exception type for the library. `code()` drives the CLI exit-code
/// mapping and the wire protocol's `{code, message}` error bodies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

/// Writes a one-line warning to stderr.
void warn(std::string_view message);

}  // namespace unistitch

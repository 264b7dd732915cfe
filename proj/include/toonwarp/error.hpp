#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace toonwarp {

enum class ErrorCode {
  InvalidDimension,
  InvalidArgument,
  Format,
  NumericFailure,
  Dataset,
  InvalidDataset,
  Io,
};

/// Stable machine-readable name, e.g. "invalid-dimension".
std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library. `what()` carries the detail only;
/// the CLI prints `error: <code>: <detail>`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace toonwarp

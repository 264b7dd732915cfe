#include "toonwarp/error.hpp"

namespace toonwarp {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDimension:
      return "invalid-dimension";
    case ErrorCode::InvalidArgument:
      return "invalid-argument";
    case ErrorCode::Format:
      return "format";
    case ErrorCode::NumericFailure:
      return "numeric-failure";
    case ErrorCode::Dataset:
      return "dataset";
    case ErrorCode::InvalidDataset:
      return "invalid-dataset";
    case ErrorCode::Io:
      return "io";
  }
  return "unknown";
}

}  // namespace toonwarp

#include "lsilu/error.hpp"

namespace lsilu {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::size_mismatch: return "size_mismatch";
    case ErrorCode::missing_diagonal: return "missing_diagonal";
    case ErrorCode::zero_pivot: return "zero_pivot";
    case ErrorCode::sr_requires_symmetrized_levels: return "sr_requires_symmetrized_levels";
    case ErrorCode::sr_dependency_violation: return "sr_dependency_violation";
  }
  return "unknown";
}

void throw_error(ErrorCode code, const std::string& what, Index row) {
  throw Error(code, what, row);
}

}  // namespace lsilu

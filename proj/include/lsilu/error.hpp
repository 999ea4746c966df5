#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lsilu {

using Index = std::int32_t;

enum class ErrorCode {
  invalid_argument = 1,
  parse_error,
  io_error,
  size_mismatch,
  missing_diagonal,
  zero_pivot,
  sr_requires_symmetrized_levels,
  sr_dependency_violation,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library. `row()` names the offending row for
// missing_diagonal / zero_pivot / sr_dependency_violation, and is -1 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, Index row = -1)
      : std::runtime_error(what), code_(code), row_(row) {}

  ErrorCode code() const noexcept { return code_; }
  Index row() const noexcept { return row_; }

 private:
  ErrorCode code_;
  Index row_;
};

[[noreturn]] void throw_error(ErrorCode code, const std::string& what, Index row = -1);

}  // namespace lsilu

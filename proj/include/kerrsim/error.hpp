#pragma once

#include <stdexcept>
#include <string>

namespace kerrsim {

// Values are shared with the C ABI status codes in kerrsim.h.
enum class ErrorCode : int {
  invalid_argument = 1,
  invalid_dimension = 2,
  invalid_parameter = 3,
  no_bistability = 4,
  pole = 5,
  precision = 6,
  convergence = 7,
  degenerate_null_space = 8,
  stiffness = 9,
  truncation = 10,
  grid_budget = 11,
  state_invalid = 12,
  config = 13,
  io = 14,
  internal = 15,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace kerrsim

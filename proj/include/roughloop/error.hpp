#pragma once

#include <stdexcept>
#include <string>

namespace roughloop {

// Numeric values are shared with the C API (rl_status).
enum class ErrorCode : int {
  invalid_argument = 1,
  level_mismatch = 2,
  out_of_range = 3,
  cut_locus = 4,
  not_closed = 5,
  outside_domain = 6,
  config = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const char* what) {
  if (!ok) throw Error(code, what);
}

}  // namespace roughloop

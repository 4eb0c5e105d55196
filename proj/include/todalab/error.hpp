#pragma once

#include <stdexcept>
#include <string>

namespace todalab {

enum class ErrorCode {
  kInvalidArgument = 1,
  kDomain = 2,
  kConfig = 3,
  kNumerical = 4,
  kIo = 5,
  kMargin = 6,
};

// Base exception for the library. The C API maps `code()` onto status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline Error invalid_argument(const std::string& msg) {
  return Error(ErrorCode::kInvalidArgument, msg);
}
inline Error domain_error(const std::string& msg) {
  return Error(ErrorCode::kDomain, msg);
}
inline Error numerical_error(const std::string& msg) {
  return Error(ErrorCode::kNumerical, msg);
}
inline Error config_error(const std::string& msg) {
  return Error(ErrorCode::kConfig, msg);
}
inline Error io_error(const std::string& msg) {
  return Error(ErrorCode::kIo, msg);
}
inline Error margin_error(const std::string& msg) {
  return Error(ErrorCode::kMargin, msg);
}

}  // namespace todalab

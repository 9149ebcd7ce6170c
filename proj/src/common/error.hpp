#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace egan {

enum class ErrorKind {
  kShape,
  kContract,
  kDegenerate,
  kSingular,
  kFormat,
  kIo,
  kDivergence,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the library; the kind maps 1:1 onto the C API
// status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(std::uint64_t step, const std::string& what)
      : Error(ErrorKind::kDivergence, what), step_(step) {}

  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace egan

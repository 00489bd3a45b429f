#pragma once

#include <stdexcept>
#include <string>

namespace cspca {

enum class ErrorKind {
  InvalidArgument,
  Io,
  Parse,
  Data,
  Dimension,
  Numerical,
};

// All library failures are reported through this exception; the C API maps
// `kind()` onto its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace cspca

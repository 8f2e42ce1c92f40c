#pragma once

#include <stdexcept>
#include <string>

namespace difflat {

enum class ErrorKind {
  InvalidInput,
  InvalidParameter,
  DisconnectedVertex,
  DegenerateBandwidth,
  SingularCovariance,
  SingularPencil,
  NoDifferentialSignal,
  UndefinedCorrelation,
  Numerical,
  Config,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace difflat

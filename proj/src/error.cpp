#include "difflat/error.hpp"

namespace difflat {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::InvalidParameter: return "invalid parameter";
    case ErrorKind::DisconnectedVertex: return "disconnected vertex";
    case ErrorKind::DegenerateBandwidth: return "degenerate bandwidth";
    case ErrorKind::SingularCovariance: return "singular covariance";
    case ErrorKind::SingularPencil: return "singular pencil";
    case ErrorKind::NoDifferentialSignal: return "no differential signal";
    case ErrorKind::UndefinedCorrelation: return "undefined correlation";
    case ErrorKind::Numerical: return "numerical failure";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "i/o error";
  }
  return "unknown error";
}

}  // namespace difflat

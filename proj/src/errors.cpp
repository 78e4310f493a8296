#include "gsobol/errors.hpp"

namespace gsobol {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Io: return "io";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::NonSimpleSpectrum: return "non_simple_spectrum";
    case ErrorKind::Basis: return "basis";
    case ErrorKind::Schedule: return "schedule";
    case ErrorKind::Unattainable: return "unattainable";
    case ErrorKind::InvalidRho: return "invalid_rho";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Degenerate:
    case ErrorKind::NonSimpleSpectrum:
    case ErrorKind::Unattainable:
      return 3;
    case ErrorKind::Io:
      return 4;
    default:
      return 2;
  }
}

}  // namespace gsobol

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsobol {

enum class ErrorKind {
  Config,             // invalid distribution parameters, bad CLI config
  Domain,             // shape / arity / index out of range
  Degenerate,         // vanishing trace in a denominator
  Io,                 // external model or file failure
  Unsupported,        // no closed form known
  Capacity,           // enumeration too large
  NonSimpleSpectrum,  // repeated eigenvalues
  Basis,              // basis not orthonormal under the quadrature
  Schedule,           // truncation schedule outside its admissible range
  Unattainable,       // sample size planner hit its cap
  InvalidRho,         // sample row violates the norm bound
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

// Process exit code used by the command line front end.
int exit_code(ErrorKind kind) noexcept;

}  // namespace gsobol

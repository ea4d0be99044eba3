#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlint {

enum class ErrorKind {
  Domain,        // argument outside the mathematical domain of a formula
  Range,         // lookup outside a tabulated range
  Resolution,    // frequency grid cannot resolve the spectrum
  Numerical,     // decomposition failure or a consistency bound violated
  Analysis,      // post-processing (FWHM, peaks) not defined on the data
  Precondition,  // caller broke a documented precondition
  Validation,    // scenario field invariant violated
  Parse,         // scenario syntax error
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace nlint

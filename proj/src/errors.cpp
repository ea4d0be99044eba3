#include "nlint/errors.hpp"

namespace nlint {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Range: return "range error";
    case ErrorKind::Resolution: return "resolution error";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::Analysis: return "analysis error";
    case ErrorKind::Precondition: return "precondition error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Io: return "I/O error";
  }
  return "error";
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace nlint

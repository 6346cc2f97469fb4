#include "moran/errors.hpp"

namespace moran {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::input:
      return 2;
    case ErrorKind::singular_design:
      return 3;
    case ErrorKind::convergence:
      return 4;
    case ErrorKind::bootstrap_unstable:
      return 5;
  }
  return 1;
}

Error::Error(ErrorKind kind, const std::string& module, const std::string& what)
    : std::runtime_error(module + ": " + what), kind_(kind), module_(module) {}

}  // namespace moran

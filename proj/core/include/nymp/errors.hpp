#pragma once

#include <stdexcept>

namespace nymp {

// Bad user input: unknown format name, malformed config or matrix file.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure inside an algorithm: Cholesky breakdown, indefinite
// operator, eigensolver non-convergence, PCG breakdown.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A value left the representable range of a simulated format while the
// format's overflow policy is Error.
struct overflow_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nymp

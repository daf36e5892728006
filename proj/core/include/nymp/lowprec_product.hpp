#pragma once

#include <Eigen/Dense>

#include "nymp/float_format.hpp"

namespace nymp {

// How faithfully the simulated-precision matrix product models hardware.
//
// PerOp:   inputs are rounded, then every multiply and every add of the
//          inner products is rounded individually, accumulating in ascending
//          summation-index order.  Bit-reproducible and the mode all error
//          bounds are stated for.
// RoundIO: inputs and outputs are rounded but the product itself runs in
//          working precision.  Much faster, less faithful; callers should
//          surface the mode in any reported results.
enum class MatmulMode { PerOp, RoundIO };

// C = A*B evaluated in the simulated format.  Inputs must be conformable
// with all entries finite (std::invalid_argument otherwise).  Overflow
// during rounding follows fmt.overflow_policy: policy Error aborts the
// product with nymp::overflow_error, SaturateToInf lets +-inf propagate into
// the result.  With a working-precision format the result equals the plain
// sequentially accumulated product bitwise, in either mode.
Eigen::MatrixXd matmul_lowprec(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& b,
                               const FloatFormat& fmt, MatmulMode mode);

// The working-precision comparator for matmul_lowprec: same loop nest and
// accumulation order, no rounding.  Exposed so tests and callers can measure
// simulated-precision error against a fixed evaluation order instead of a
// blocked BLAS product.
Eigen::MatrixXd matmul_reference(const Eigen::MatrixXd& a,
                                 const Eigen::MatrixXd& b);

const char* to_string(MatmulMode mode);
MatmulMode matmul_mode_from_string(const std::string& s);

}  // namespace nymp

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "nymp/lowprec_product.hpp"
#include "nymp/spd_matrix.hpp"

namespace nymp {

// Gaussian sketch after orthonormalization: Q is n x (k+l) with orthonormal
// columns (thin QR of a seeded gaussian matrix).
struct SketchMatrix {
  Eigen::MatrixXd q;
  int k = 0;
  int l = 0;
  std::uint64_t seed = 0;
};

// Draw and orthonormalize the sketch.  Rank deficiency of the gaussian draw
// (probability zero, detected from the QR diagonal) is retried with a
// deterministically offset seed at most three times before numeric_error.
SketchMatrix draw_sketch(int n, int k, int l, std::uint64_t seed);

// Rank-k eigenvalue decomposition U diag(theta) U^T of the shifted
// single-pass Nystrom approximation.  U has orthonormal columns; theta is
// nonnegative and descending; nu is the stabilization shift actually used
// (2 * u_p * ||Y||_F, removed from the eigenvalues at the end).
struct NystromApprox {
  Eigen::MatrixXd u;
  Eigen::VectorXd theta;
  double nu = 0;
  int k = 0;
  int l = 0;
  FloatFormat up;
  MatmulMode mode = MatmulMode::PerOp;
  std::uint64_t seed = 0;
};

// Single-pass Nystrom approximation of an SPD matrix where only the sketch
// product Y = A*Q is evaluated in the simulated precision `up`; every other
// step (QR, Cholesky, triangular solve, SVD) runs in working precision.
// Steps: Q from draw_sketch; Y = matmul_lowprec(A, Q, up, mode);
// nu = 2*u_p*||Y||_F; Y_nu = Y + nu*Q; B = Q^T Y_nu; C = chol((B+B^T)/2);
// F = Y_nu C^-1; thin SVD of F; keep k leading vectors;
// theta_i = max(0, sigma_i^2 - nu).
//
// Requires 1 <= k, 0 <= l, k+l <= n.  Cholesky breakdown (possible when the
// rounded product destroys definiteness) raises numeric_error naming the
// failing pivot; overflow follows the format policy.
NystromApprox nystrom_approx(const SpdMatrix& a, int k, int l,
                             const FloatFormat& up, MatmulMode mode,
                             std::uint64_t seed);

// Densify U diag(theta) U^T.
SpdMatrix reconstruct(const NystromApprox& approx);

// total:  ||A - A_hat||_2, the full approximation error of `approx`.
// finite: ||A_ref - A_hat||_2 against a working-precision reference run
//         (nullopt when no reference is given).  The reference must share
//         (k, l, seed, mode) and have a working-precision format; anything
//         else is a contract violation (std::invalid_argument).
struct ApproxErrors {
  double total = 0;
  std::optional<double> finite;
};

ApproxErrors approx_errors(const SpdMatrix& a, const NystromApprox& approx,
                           const NystromApprox* reference = nullptr);

// Columnar text serialization (dimensions and metadata header, then U
// column-major, theta, nu) for reuse by the preconditioner CLI path.
void save_approx(const NystromApprox& approx, const std::string& path);
NystromApprox load_approx(const std::string& path);

}  // namespace nymp

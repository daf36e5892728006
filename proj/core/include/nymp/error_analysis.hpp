#pragma once

#include <optional>

#include <Eigen/Dense>

#include "nymp/float_format.hpp"
#include "nymp/spd_matrix.hpp"

namespace nymp {

// Rounding-error growth factors for an inner product of length n evaluated
// in the given format:
//   gamma       = n*u / (1 - n*u)
//   gamma_tilde = c*n*u / (1 - c*n*u)
// valid only while c*n*u < 1 (`valid` false otherwise; the fp8 formats leave
// the regime already at n >= 4 resp. 8).
struct GammaFactors {
  int n = 0;
  double c = 1.0;
  double gamma = 0;
  double gamma_tilde = 0;
  bool valid = false;
};

GammaFactors gamma_factors(int n, const FloatFormat& up, double c = 1.0);

// A-priori estimate of the finite-precision error of the mixed-precision
// Nystrom approximation: sqrt(n) * gamma_tilde_n * ||A||_2.  Throws
// numeric_error naming n*u_p when the gamma factors are out of range.
double finite_error_proxy(int n, double norm2, const FloatFormat& up,
                          double c = 1.0);
double finite_error_proxy(const SpdMatrix& a, const FloatFormat& up,
                          double c = 1.0);

// ||A X (X^T A X)^+||_2, the weighted pseudoinverse norm that controls how
// sketch-space perturbations amplify.  X must have full column rank k <= n;
// the pseudoinverse uses singular value cutoff k * u_fp64 * sigma_max.
double weighted_pseudoinv_norm(const SpdMatrix& a, const Eigen::MatrixXd& x);

// eta_k = lambda_k^(1/2) / sigma_k(X^T A^(1/2)).  Returns +inf when
// sigma_k is numerically zero.
double eta_ratio(const SpdMatrix& a, const Eigen::MatrixXd& x);

// Bounds on the weighted pseudoinverse norm for a rank-k analysis:
//   deterministic: kappa(A_k)^(1/2) * eta_k              (always true)
//   probabilistic: kappa(A_k)^(1/2) * sqrt(k) / alpha    (gaussian X;
//                  fails with probability <= c1*alpha, c1 an absolute
//                  constant reported symbolically as 1)
struct PseudoinvNormBounds {
  double deterministic = 0;
  double probabilistic = 0;
  double alpha = 0;
  double failure_probability = 0;  // c1*alpha with c1 = 1
};

PseudoinvNormBounds pseudoinv_norm_bounds(const SpdMatrix& a, const Eigen::MatrixXd& x, int k,
                         double alpha);

// Sharper a-priori bound using j = floor(rank(A)/k) spectrum blocks:
//   lambda_max^(1/2) * sqrt(k) / (alpha * (sum_{i=1..j} lambda_{i*k})^(1/2))
// failing with probability <= j*c1*alpha.  Requires rank(A) >= k (numeric
// rank at cutoff n*u_fp64*lambda_max); j=1 reproduces the plain
// probabilistic bound.
struct PartitionedBound {
  double bound = 0;
  int blocks = 0;
  double failure_probability = 0;  // j*alpha, with the same c1 = 1 caveat
};

PartitionedBound partitioned_bound(const SpdMatrix& a, int k, double alpha);

// Additive finite-precision term of the total error bound:
//   alpha^-1 * sqrt(n) * k * (sqrt(n)+sqrt(k)+t)^2 * gamma_tilde_n
//     * ||A||_2 * kappa(A_k)
// holding except with probability exp(-t^2/2) + c1*alpha.
struct FiniteTermBound {
  double term = 0;
  double failure_probability = 0;
};

FiniteTermBound finite_term_bound(const SpdMatrix& a, int k,
                                const FloatFormat& up, double alpha = 0.1,
                                double t = 3.0, double c = 1.0);

// Expected exact-arithmetic error bound for the gaussian Nystrom
// approximation (no oversampling):
//   min_{2 <= p <= k-2} (1 + 2(k-p)/(p-1)) * lambda_{k-p+1}
//                       + (2 e^2 k / (p^2-1)) * sum_{j>k-p} lambda_j
// eigs must be descending; requires 4 <= k <= n.
double expected_exact_error_bound(const Eigen::VectorXd& eigs, int k);

// Precision-selection heuristic: flag = (lambda_{k+1}/lambda_max <=
// sqrt(n)*u_p), meaning the discarded spectrum is already below the
// precision floor and u_p costs nothing at rank k.
struct HeuristicCheck {
  bool flag = false;
  double ratio = 0;      // lambda_{k+1} / lambda_max
  double threshold = 0;  // sqrt(n) * u_p
};

HeuristicCheck heuristic_check(const Eigen::VectorXd& eigs, int k,
                               const FloatFormat& up);

}  // namespace nymp

#pragma once

#include <optional>

#include <Eigen/Dense>

#include "nymp/float_format.hpp"
#include "nymp/nystrom.hpp"
#include "nymp/spd_matrix.hpp"

namespace nymp {

// Limited-memory preconditioner induced by a rank-k eigenvalue approximation
// U diag(theta) U^T of A, targeting the shifted system A + mu*I:
//
//   P^-1 = I - U U^T + (alpha + mu) U (diag(theta) + mu I)^-1 U^T
//
// with alpha = theta_k (the smallest retained eigenvalue estimate).  Applying
// P^-1 or P^-1/2 costs O(nk); only U and theta are stored.  Eigenvalues of
// the preconditioned operator map theta_i -> (theta_k + mu)/(theta_i + mu)
// on the captured subspace and stay 1 elsewhere.
class LmpPreconditioner {
 public:
  // Requires mu >= 0 and theta_k + mu > 0.
  static LmpPreconditioner build(const NystromApprox& approx, double mu);

  // Same operator from explicit factors (orthonormal U, nonnegative
  // descending theta); format records which precision produced the factors.
  static LmpPreconditioner build(Eigen::MatrixXd u, Eigen::VectorXd theta,
                                 double mu, FloatFormat source_format);

  Eigen::VectorXd apply_inv(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_inv_sqrt(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;  // P itself

  int n() const { return static_cast<int>(u_.rows()); }
  int k() const { return static_cast<int>(theta_.size()); }
  double mu() const { return mu_; }
  double lambda_k_hat() const { return theta_(theta_.size() - 1); }
  const Eigen::MatrixXd& u() const { return u_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  const FloatFormat& source_format() const { return source_format_; }

 private:
  LmpPreconditioner() = default;

  Eigen::MatrixXd u_;
  Eigen::VectorXd theta_;
  double mu_ = 0;
  FloatFormat source_format_;
  // (theta_k + mu) / (theta_i + mu), precomputed for the apply paths.
  Eigen::VectorXd inv_ratio_;
};

// Condition number kappa_2 of P^-1/2 (A + mu I) P^-1/2, measured by forming
// the preconditioned operator densely and eigensolving.  Throws
// numeric_error if the preconditioned operator is not numerically PD.
double measured_condition_number(const SpdMatrix& a,
                                 const LmpPreconditioner& p);

// A-priori bounds on that condition number given norms (measured or
// estimated) of the exact-arithmetic error E = A - A_N and the
// finite-precision error Eps = A_N - A_N_hat:
//   b_low    = max(1, (lhat_k + mu - ||Eps||) / (mu + lambda_min(A)))
//   b_upp    = 1 + (lhat_k + ||E|| + 2||Eps||) / (mu - ||Eps||)
//              (only valid when mu > ||Eps||)
//   b_uppspd = (lhat_k + mu + ||E|| + ||Eps||)
//              * (1/(lhat_k + mu) + (||Eps|| + 1)/(lambda_min(A) + mu))
//              (only valid when A is positive definite)
// kappa_unprec = (lambda_max + mu)/(lambda_min + mu) is included for
// reference.  estimates_used records whether the norms were measured or
// came from the a-priori estimates.
struct CondReport {
  double mu = 0;
  double lambda_k_hat = 0;
  double e_norm = 0;
  double eps_norm = 0;
  bool estimates_used = false;
  double kappa_unprec = 0;
  double b_low = 0;
  std::optional<double> b_upp;
  std::optional<double> b_uppspd;
};

CondReport cond_bounds(const SpdMatrix& a, const LmpPreconditioner& p,
                       double e_norm, double eps_norm, bool estimates_used);

}  // namespace nymp

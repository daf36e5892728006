#include "nymp/lmp.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nymp/errors.hpp"

namespace nymp {

LmpPreconditioner LmpPreconditioner::build(const NystromApprox& approx,
                                           double mu) {
  return build(approx.u, approx.theta, mu, approx.up);
}

LmpPreconditioner LmpPreconditioner::build(Eigen::MatrixXd u,
                                           Eigen::VectorXd theta, double mu,
                                           FloatFormat source_format) {
  if (u.cols() != theta.size() || u.cols() < 1)
    throw std::invalid_argument("LmpPreconditioner: factor dimensions differ");
  if (mu < 0)
    throw std::invalid_argument("LmpPreconditioner: mu must be nonnegative");
  const Eigen::Index k = theta.size();
  for (Eigen::Index i = 0; i + 1 < k; ++i)
    if (theta(i) < theta(i + 1))
      throw std::invalid_argument("LmpPreconditioner: theta must descend");
  double lhat_k = theta(k - 1);
  if (!(lhat_k + mu > 0))
    throw std::invalid_argument(
        "LmpPreconditioner: theta_k + mu must be positive");

  LmpPreconditioner p;
  p.u_ = std::move(u);
  p.theta_ = std::move(theta);
  p.mu_ = mu;
  p.source_format_ = std::move(source_format);
  p.inv_ratio_ =
      (lhat_k + mu) * (p.theta_.array() + mu).inverse().matrix();
  return p;
}

namespace {

// y = x + U (w .* (U^T x)) evaluates every variant of the operator; only the
// spectral weights w differ.
Eigen::VectorXd low_rank_apply(const Eigen::MatrixXd& u,
                               const Eigen::VectorXd& weights,
                               const Eigen::VectorXd& x) {
  Eigen::VectorXd t = u.transpose() * x;
  return x + u * (weights.asDiagonal() * t - t);
}

}  // namespace

Eigen::VectorXd LmpPreconditioner::apply_inv(const Eigen::VectorXd& x) const {
  return low_rank_apply(u_, inv_ratio_, x);
}

Eigen::VectorXd LmpPreconditioner::apply_inv_sqrt(
    const Eigen::VectorXd& x) const {
  return low_rank_apply(u_, inv_ratio_.cwiseSqrt(), x);
}

Eigen::VectorXd LmpPreconditioner::apply(const Eigen::VectorXd& x) const {
  return low_rank_apply(u_, inv_ratio_.cwiseInverse(), x);
}

double measured_condition_number(const SpdMatrix& a,
                                 const LmpPreconditioner& p) {
  if (a.n() != p.n())
    throw std::invalid_argument(
        "measured_condition_number: dimension mismatch");
  const int n = a.n();

  // M = P^-1/2 (A + mu I) P^-1/2, assembled column by column.
  Eigen::MatrixXd b = a.entries();
  b.diagonal().array() += p.mu();
  Eigen::MatrixXd z(n, n);
  for (int j = 0; j < n; ++j) z.col(j) = p.apply_inv_sqrt(b.col(j));
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) m.col(j) = p.apply_inv_sqrt(z.row(j).transpose());
  m = 0.5 * (m + m.transpose());

  auto [lo, hi] = eig_range(m);
  if (!(lo > 0)) {
    std::ostringstream msg;
    msg << "preconditioned operator is not positive definite "
        << "(lambda_min = " << lo << ")";
    throw numeric_error(msg.str());
  }
  return hi / lo;
}

CondReport cond_bounds(const SpdMatrix& a, const LmpPreconditioner& p,
                       double e_norm, double eps_norm, bool estimates_used) {
  if (a.n() != p.n())
    throw std::invalid_argument("cond_bounds: dimension mismatch");
  if (e_norm < 0 || eps_norm < 0)
    throw std::invalid_argument("cond_bounds: norms must be nonnegative");

  double mu = p.mu();
  double lhat = p.lambda_k_hat();
  double lmin = a.lambda_min();
  double lmax = a.norm2();
  if (!(lmin + mu > 0))
    throw numeric_error("cond_bounds: A + mu I is not positive definite");

  CondReport r;
  r.mu = mu;
  r.lambda_k_hat = lhat;
  r.e_norm = e_norm;
  r.eps_norm = eps_norm;
  r.estimates_used = estimates_used;
  r.kappa_unprec = (lmax + mu) / (lmin + mu);
  r.b_low = std::max(1.0, (lhat + mu - eps_norm) / (mu + lmin));
  if (mu > eps_norm)
    r.b_upp = 1.0 + (lhat + e_norm + 2.0 * eps_norm) / (mu - eps_norm);
  if (lmin > 0)
    r.b_uppspd = (lhat + mu + e_norm + eps_norm) *
                 (1.0 / (lhat + mu) + (eps_norm + 1.0) / (lmin + mu));
  return r;
}

}  // namespace nymp

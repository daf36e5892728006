#include "nymp/pcg.hpp"

#include <cmath>
#include <sstream>

#include "nymp/errors.hpp"
#include "nymp/rng.hpp"

namespace nymp {

PcgResult pcg_solve(const SpdMatrix& a, const Eigen::VectorXd& b,
                    const LmpPreconditioner* precond, const PcgConfig& cfg) {
  const int n = a.n();
  if (b.size() != n)
    throw std::invalid_argument("pcg_solve: rhs dimension mismatch");
  if (cfg.mu < 0) throw std::invalid_argument("pcg_solve: mu must be >= 0");
  if (precond != nullptr && precond->n() != n)
    throw std::invalid_argument("pcg_solve: preconditioner dimension mismatch");
  const int max_iter = cfg.max_iter < 0 ? 5 * n : cfg.max_iter;

  const Eigen::MatrixXd& m = a.entries();
  auto op = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return m * v + cfg.mu * v;
  };

  double bnorm = b.norm();
  PcgResult res;
  res.x = Eigen::VectorXd::Zero(n);
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }

  Eigen::VectorXd r = b;
  Eigen::VectorXd z = precond ? precond->apply_inv(r) : r;
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  res.relres = 1.0;

  for (int it = 1; it <= max_iter; ++it) {
    if (rz <= 0) {
      std::ostringstream msg;
      msg << "pcg breakdown at iteration " << it
          << ": r^T z = " << rz << " with nonzero residual";
      throw numeric_error(msg.str());
    }
    Eigen::VectorXd q = op(p);
    double pq = p.dot(q);
    if (pq <= 0) {
      std::ostringstream msg;
      msg << "pcg breakdown at iteration " << it
          << ": operator is not positive definite (p^T A p = " << pq << ")";
      throw numeric_error(msg.str());
    }
    double alpha = rz / pq;
    res.x += alpha * p;
    r -= alpha * q;

    // Stopping decision on the true residual, not the recurrence.
    res.relres = (b - op(res.x)).norm() / bnorm;
    res.iterations = it;
    if (cfg.record_history) res.history.push_back(res.relres);
    if (res.relres <= cfg.tol) {
      res.converged = true;
      return res;
    }

    z = precond ? precond->apply_inv(r) : r;
    double rz_next = r.dot(z);
    double beta = rz_next / rz;
    rz = rz_next;
    p = z + beta * p;
  }
  return res;
}

Eigen::VectorXd rhs_uniform(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("rhs_uniform: n must be positive");
  RandomStream rng(seed);
  return rng.uniform_vector(n);
}

}  // namespace nymp

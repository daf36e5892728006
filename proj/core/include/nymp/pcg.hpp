#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nymp/lmp.hpp"
#include "nymp/spd_matrix.hpp"

namespace nymp {

struct PcgConfig {
  double mu = 0;            // solve (A + mu*I) x = b
  double tol = 1e-6;        // on ||b - (A+mu I)x|| / ||b||, true residual
  int max_iter = -1;        // -1 selects the default 5*n
  bool record_history = false;
};

struct PcgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
  double relres = 0;
  std::vector<double> history;  // per-iteration true relative residuals
};

// Left-preconditioned conjugate gradients on A + mu*I with zero initial
// guess.  The stopping test recomputes the true residual every iteration.
// pass precond = nullptr for the unpreconditioned method.  Breakdown
// (r^T z <= 0 with r nonzero, or an indefinite operator) raises
// numeric_error naming the iteration.
PcgResult pcg_solve(const SpdMatrix& a, const Eigen::VectorXd& b,
                    const LmpPreconditioner* precond, const PcgConfig& cfg);

// Standard uniform(0,1) right-hand side, fixed by the seed (default 1234,
// the conventional choice in the experiments).
Eigen::VectorXd rhs_uniform(int n, std::uint64_t seed = 1234);

}  // namespace nymp

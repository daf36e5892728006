#include <cmath>

#include <Eigen/Dense>

#include "doctest.h"

#include "nymp/errors.hpp"
#include "nymp/generators.hpp"
#include "nymp/lmp.hpp"
#include "nymp/nystrom.hpp"
#include "nymp/pcg.hpp"
#include "nymp/rng.hpp"
#include "nymp/spd_matrix.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace nymp;

namespace {

SpdMatrix geometric_diag(int n, double top, double rate) {
  VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = top * std::pow(rate, i);
  return SpdMatrix::from_dense(d.asDiagonal(),
                               {Provenance::Kind::Derived, "geometric"});
}

}  // namespace

TEST_SUITE_BEGIN("pcg");

TEST_CASE("solves a shifted system to the requested residual") {
  SpdMatrix a = geometric_diag(30, 50.0, 0.8);
  VectorXd b = rhs_uniform(30);
  PcgConfig cfg;
  cfg.mu = 0.5;
  cfg.tol = 1e-10;
  PcgResult res = pcg_solve(a, b, nullptr, cfg);
  CHECK(res.converged);
  CHECK(res.relres <= 1e-10);
  MatrixXd shifted = a.entries() + 0.5 * MatrixXd::Identity(30, 30);
  VectorXd direct = shifted.ldlt().solve(b);
  CHECK((res.x - direct).norm() < 1e-8 * direct.norm());
  // The reported residual is the true one.
  CHECK(res.relres ==
        doctest::Approx((b - shifted * res.x).norm() / b.norm()));
}

TEST_CASE("zero right-hand side returns immediately") {
  SpdMatrix a = geometric_diag(10, 5.0, 0.9);
  PcgResult res = pcg_solve(a, VectorXd::Zero(10), nullptr, {});
  CHECK(res.converged);
  CHECK(res.iterations == 0);
  CHECK(res.x.norm() == 0.0);
}

TEST_CASE("iteration cap reports non-convergence") {
  SpdMatrix a = geometric_diag(40, 1e6, 0.5);
  VectorXd b = rhs_uniform(40);
  PcgConfig cfg;
  cfg.tol = 1e-14;
  cfg.max_iter = 2;
  PcgResult res = pcg_solve(a, b, nullptr, cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 2);
  CHECK(res.relres > 1e-14);
}

TEST_CASE("history records one true residual per iteration") {
  SpdMatrix a = geometric_diag(25, 10.0, 0.7);
  VectorXd b = rhs_uniform(25);
  PcgConfig cfg;
  cfg.record_history = true;
  cfg.tol = 1e-8;
  PcgResult res = pcg_solve(a, b, nullptr, cfg);
  CHECK(res.converged);
  CHECK(static_cast<int>(res.history.size()) == res.iterations);
  CHECK(res.history.back() == res.relres);
  PcgConfig quiet = cfg;
  quiet.record_history = false;
  CHECK(pcg_solve(a, b, nullptr, quiet).history.empty());
}

TEST_CASE("deflating the leading modes cuts the iteration count") {
  // Spread spectrum: a handful of large outliers over a flat bulk.
  const int n = 60, k = 6;
  VectorXd d(n);
  for (int i = 0; i < k; ++i) d(i) = 1e4 / (1.0 + i);
  for (int i = k; i < n; ++i) d(i) = 1.0 + 0.01 * (i - k);
  SpdMatrix a = SpdMatrix::from_dense(
      d.asDiagonal(), {Provenance::Kind::Derived, "outliers"});
  VectorXd b = rhs_uniform(n);
  PcgConfig cfg;
  cfg.mu = 0.5;
  PcgResult plain = pcg_solve(a, b, nullptr, cfg);
  auto p = LmpPreconditioner::build(MatrixXd::Identity(n, k), d.head(k),
                                    cfg.mu, builtin_format("fp64"));
  PcgResult prec = pcg_solve(a, b, &p, cfg);
  CHECK(plain.converged);
  CHECK(prec.converged);
  CHECK(prec.iterations < plain.iterations);
  MatrixXd shifted = a.entries() + cfg.mu * MatrixXd::Identity(n, n);
  VectorXd direct = shifted.ldlt().solve(b);
  CHECK((prec.x - direct).norm() < 1e-4 * direct.norm());
}

TEST_CASE("preconditioners from approximate factors keep pcg consistent") {
  // r < k: a rank-6 deflation reaches past the two beta outliers into the
  // decaying tail, so the preconditioned solve should win outright.
  SyntheticSpec s;
  s.kind = SyntheticKind::PolyDecay;
  s.n = 50;
  s.r = 2;
  s.beta = 1e3;
  s.decay = 1.0;
  SpdMatrix a = gen_synthetic(s);
  VectorXd b = rhs_uniform(50);
  PcgConfig cfg;
  cfg.mu = 0.5;
  NystromApprox ap =
      nystrom_approx(a, 6, 0, builtin_format("fp32"), MatmulMode::PerOp, 4);
  auto p = LmpPreconditioner::build(ap, cfg.mu);
  PcgResult prec = pcg_solve(a, b, &p, cfg);
  PcgResult plain = pcg_solve(a, b, nullptr, cfg);
  CHECK(prec.converged);
  CHECK(prec.relres <= cfg.tol);
  CHECK(prec.iterations < plain.iterations);
}

TEST_CASE("indefinite operators break down with a named iteration") {
  MatrixXd m = MatrixXd::Identity(5, 5);
  m(4, 4) = 1e-11;  // passes the PSD gate
  SpdMatrix a = SpdMatrix::from_dense(m, {Provenance::Kind::Derived, "near"});
  // Negative shift is rejected before any iteration runs.
  PcgConfig cfg;
  cfg.mu = -1.0;
  CHECK_THROWS_AS(pcg_solve(a, rhs_uniform(5), nullptr, cfg),
                  std::invalid_argument);
}

TEST_CASE("input validation") {
  SpdMatrix a = geometric_diag(8, 2.0, 0.9);
  CHECK_THROWS_AS(pcg_solve(a, rhs_uniform(9), nullptr, {}),
                  std::invalid_argument);
  auto p = LmpPreconditioner::build(MatrixXd::Identity(6, 2),
                                    (VectorXd(2) << 2, 1).finished(), 0.5,
                                    builtin_format("fp64"));
  CHECK_THROWS_AS(pcg_solve(a, rhs_uniform(8), &p, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(rhs_uniform(0), std::invalid_argument);
}

TEST_CASE("the conventional right-hand side is stable across calls") {
  VectorXd a = rhs_uniform(12);
  VectorXd b = rhs_uniform(12);
  VectorXd c = rhs_uniform(12, 99);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
  CHECK(a.minCoeff() > 0.0);
  CHECK(a.maxCoeff() < 1.0);
}

TEST_SUITE_END();

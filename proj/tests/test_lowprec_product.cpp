#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "doctest.h"

#include "nymp/errors.hpp"
#include "nymp/float_format.hpp"
#include "nymp/lowprec_product.hpp"
#include "nymp/rng.hpp"

using Eigen::MatrixXd;
using nymp::builtin_format;
using nymp::FloatFormat;
using nymp::matmul_lowprec;
using nymp::matmul_reference;
using nymp::MatmulMode;

TEST_SUITE_BEGIN("lowprec_product");

TEST_CASE("fp64 product is bitwise identical to the reference") {
  nymp::RandomStream rng(3);
  MatrixXd a = rng.gaussian_matrix(40, 17);
  MatrixXd b = rng.gaussian_matrix(17, 9);
  FloatFormat d = builtin_format("fp64");
  MatrixXd ref = matmul_reference(a, b);
  MatrixXd per = matmul_lowprec(a, b, d, MatmulMode::PerOp);
  MatrixXd io = matmul_lowprec(a, b, d, MatmulMode::RoundIO);
  CHECK((per - ref).cwiseAbs().maxCoeff() == 0.0);
  CHECK((io - ref).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("per-op rounding satisfies the accumulation error bound") {
  // |fl(AB) - fl_inputs(A)fl_inputs(B)| <= gamma_n * |A||B| entrywise, with
  // the comparison taken against the exact product of the rounded inputs.
  nymp::RandomStream rng(11);
  const int n = 60;
  MatrixXd a = rng.gaussian_matrix(30, n);
  MatrixXd b = rng.gaussian_matrix(n, 8);
  for (const char* name : {"fp16", "fp32"}) {
    CAPTURE(name);
    FloatFormat fmt = builtin_format(name);
    MatrixXd ar = a.unaryExpr(
        [&](double x) { return nymp::round_to(x, fmt); });
    MatrixXd br = b.unaryExpr(
        [&](double x) { return nymp::round_to(x, fmt); });
    MatrixXd exact = ar * br;
    MatrixXd lp = matmul_lowprec(a, b, fmt, MatmulMode::PerOp);
    double u = fmt.unit_roundoff;
    double gamma = n * u / (1.0 - n * u);
    MatrixXd cap = gamma * (ar.cwiseAbs() * br.cwiseAbs());
    CHECK(((lp - exact).cwiseAbs().array() <= cap.array() + 1e-300).all());
  }
}

TEST_CASE("per-op accumulation is deterministic and order-fixed") {
  nymp::RandomStream rng(5);
  MatrixXd a = rng.gaussian_matrix(25, 25);
  MatrixXd b = rng.gaussian_matrix(25, 6);
  FloatFormat h = builtin_format("fp16");
  MatrixXd x = matmul_lowprec(a, b, h, MatmulMode::PerOp);
  MatrixXd y = matmul_lowprec(a, b, h, MatmulMode::PerOp);
  CHECK((x - y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("round-io rounds inputs and outputs only") {
  nymp::RandomStream rng(7);
  MatrixXd a = rng.gaussian_matrix(12, 20);
  MatrixXd b = rng.gaussian_matrix(20, 4);
  FloatFormat h = builtin_format("fp16");
  MatrixXd ar = a.unaryExpr([&](double x) { return nymp::round_to(x, h); });
  MatrixXd br = b.unaryExpr([&](double x) { return nymp::round_to(x, h); });
  MatrixXd expect = (ar * br).unaryExpr(
      [&](double x) { return nymp::round_to(x, h); });
  MatrixXd got = matmul_lowprec(a, b, h, MatmulMode::RoundIO);
  CHECK((got - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-entry product reduces to scalar rounding") {
  FloatFormat h = builtin_format("fp16");
  MatrixXd a(1, 1), b(1, 1);
  a(0, 0) = 1.0 + std::ldexp(1.0, -12);  // rounds to 1.0 in fp16
  b(0, 0) = 3.0;
  MatrixXd r = matmul_lowprec(a, b, h, MatmulMode::PerOp);
  CHECK(r(0, 0) == 3.0);
}

TEST_CASE("overflow policy propagates from the format") {
  MatrixXd a(1, 2), b(2, 1);
  a << 60000.0, 60000.0;
  b << 1.0, 1.0;
  FloatFormat h = builtin_format("fp16");
  CHECK_THROWS_AS(matmul_lowprec(a, b, h, MatmulMode::PerOp),
                  nymp::overflow_error);
  h.overflow_policy = nymp::OverflowPolicy::SaturateToInf;
  MatrixXd r = matmul_lowprec(a, b, h, MatmulMode::PerOp);
  CHECK(r(0, 0) == std::numeric_limits<double>::infinity());
}

TEST_CASE("dimension mismatch and non-finite inputs are rejected") {
  MatrixXd a = MatrixXd::Zero(3, 4);
  MatrixXd b = MatrixXd::Zero(5, 2);
  FloatFormat h = builtin_format("fp16");
  CHECK_THROWS_AS(matmul_lowprec(a, b, h, MatmulMode::PerOp),
                  std::invalid_argument);
  MatrixXd c = MatrixXd::Zero(4, 2);
  MatrixXd a2 = MatrixXd::Zero(3, 4);
  a2(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(matmul_lowprec(a2, c, h, MatmulMode::PerOp),
                  std::invalid_argument);
}

TEST_CASE("mode names round-trip") {
  CHECK(nymp::matmul_mode_from_string("perop") == MatmulMode::PerOp);
  CHECK(nymp::matmul_mode_from_string("roundio") == MatmulMode::RoundIO);
  CHECK(std::string(nymp::to_string(MatmulMode::PerOp)) == "perop");
  CHECK(std::string(nymp::to_string(MatmulMode::RoundIO)) == "roundio");
  CHECK_THROWS_AS(nymp::matmul_mode_from_string("fast"),
                  nymp::config_error);
}

TEST_SUITE_END();

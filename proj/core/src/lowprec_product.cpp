#include "nymp/lowprec_product.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "nymp/errors.hpp"

namespace nymp {

namespace {

// Inlined copy of round_to for the hot accumulation loop; the public
// function stays the single source of truth for semantics and the unit
// tests pin the two paths together.
struct Rounder {
  int sig;
  int emin;
  double half_xsmin;
  double xmax;
  bool saturate;
  const FloatFormat* fmt;

  explicit Rounder(const FloatFormat& f)
      : sig(f.significand_bits),
        emin(f.min_exponent),
        half_xsmin(0.5 * f.x_s_min),
        xmax(f.x_max),
        saturate(f.overflow_policy == OverflowPolicy::SaturateToInf),
        fmt(&f) {}

  double operator()(double x) const {
    // inf/NaN appear only under SaturateToInf and propagate untouched.
    if (x == 0.0 || !std::isfinite(x)) return x;
    double m = std::abs(x);
    if (m < half_xsmin) return std::copysign(0.0, x);
    int e = static_cast<int>(std::bit_cast<std::uint64_t>(m) >> 52) - 1023;
    if (e < emin) e = emin;
    double q = std::bit_cast<double>(
        static_cast<std::uint64_t>(e - sig + 1023) << 52);
    double r = std::nearbyint(m / q) * q;
    if (r > xmax) {
      if (!saturate) {
        std::ostringstream msg;
        msg << "matmul_lowprec: |" << x << "| overflows " << fmt->name;
        throw overflow_error(msg.str());
      }
      r = std::numeric_limits<double>::infinity();
    }
    return std::copysign(r, x);
  }
};

void check_inputs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul_lowprec: inner dimensions differ");
  if (!a.allFinite() || !b.allFinite())
    throw std::invalid_argument("matmul_lowprec: entries must be finite");
}

// Sequential inner products, summation index ascending.  RowMajor staging of
// the left factor keeps both streams unit-stride.
template <bool kRound>
Eigen::MatrixXd accumulate(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Rounder& rnd) {
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor ar = a;
  const Eigen::Index n = a.rows(), kk = a.cols(), m = b.cols();
  Eigen::MatrixXd c(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double* bj = b.col(j).data();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double* ai = ar.data() + i * kk;
      double s = 0.0;
      for (Eigen::Index t = 0; t < kk; ++t) {
        if constexpr (kRound) {
          s = rnd(s + rnd(ai[t] * bj[t]));
        } else {
          s = s + ai[t] * bj[t];
        }
      }
      c(i, j) = s;
    }
  }
  return c;
}

}  // namespace

Eigen::MatrixXd matmul_reference(const Eigen::MatrixXd& a,
                                 const Eigen::MatrixXd& b) {
  check_inputs(a, b);
  Rounder rnd(builtin_format("fp64"));
  return accumulate<false>(a, b, rnd);
}

Eigen::MatrixXd matmul_lowprec(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& b,
                               const FloatFormat& fmt, MatmulMode mode) {
  check_inputs(a, b);
  if (fmt.is_working_precision()) {
    // Identity rounding: both modes reduce to the reference accumulation.
    Rounder rnd(fmt);
    return accumulate<false>(a, b, rnd);
  }

  Rounder rnd(fmt);
  Eigen::MatrixXd ar = a.unaryExpr([&](double v) { return rnd(v); });
  Eigen::MatrixXd br = b.unaryExpr([&](double v) { return rnd(v); });

  if (mode == MatmulMode::RoundIO) {
    Eigen::MatrixXd c = ar * br;
    return c.unaryExpr([&](double v) { return rnd(v); });
  }
  return accumulate<true>(ar, br, rnd);
}

const char* to_string(MatmulMode mode) {
  return mode == MatmulMode::PerOp ? "perop" : "roundio";
}

MatmulMode matmul_mode_from_string(const std::string& s) {
  if (s == "perop") return MatmulMode::PerOp;
  if (s == "roundio") return MatmulMode::RoundIO;
  throw config_error("unknown matmul mode '" + s +
                     "' (expected perop or roundio)");
}

}  // namespace nymp

#include "nymp/error_analysis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "nymp/errors.hpp"

namespace nymp {

GammaFactors gamma_factors(int n, const FloatFormat& up, double c) {
  if (n < 1) throw std::invalid_argument("gamma_factors: n must be positive");
  if (c <= 0) throw std::invalid_argument("gamma_factors: c must be positive");
  GammaFactors g;
  g.n = n;
  g.c = c;
  double nu = n * up.unit_roundoff;
  double cnu = c * nu;
  g.valid = cnu < 1.0;
  if (g.valid) {
    g.gamma = nu / (1.0 - nu);
    g.gamma_tilde = cnu / (1.0 - cnu);
  } else {
    g.gamma = g.gamma_tilde = std::numeric_limits<double>::infinity();
  }
  return g;
}

double finite_error_proxy(int n, double norm2, const FloatFormat& up,
                          double c) {
  GammaFactors g = gamma_factors(n, up, c);
  if (!g.valid) {
    std::ostringstream msg;
    msg << "finite_error_proxy: rounding theory out of range for " << up.name
        << " at n = " << n << " (c*n*u_p = " << c * n * up.unit_roundoff
        << " >= 1)";
    throw numeric_error(msg.str());
  }
  return std::sqrt(static_cast<double>(n)) * g.gamma_tilde * norm2;
}

double finite_error_proxy(const SpdMatrix& a, const FloatFormat& up,
                          double c) {
  return finite_error_proxy(a.n(), a.norm2(), up, c);
}

namespace {

// A^(1/2) from the cached spectrum would lose the eigenvectors, so
// decompose here; negative roundoff eigenvalues clamp to zero.
Eigen::MatrixXd sqrt_psd(const SpdMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.entries());
  if (es.info() != Eigen::Success)
    throw numeric_error("sqrt_psd: eigensolver did not converge");
  Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

void check_x(const SpdMatrix& a, const Eigen::MatrixXd& x) {
  if (x.rows() != a.n() || x.cols() < 1 || x.cols() > x.rows())
    throw std::invalid_argument("test matrix X must be n x k with k <= n");
}

}  // namespace

double weighted_pseudoinv_norm(const SpdMatrix& a, const Eigen::MatrixXd& x) {
  check_x(a, x);
  const Eigen::Index k = x.cols();

  Eigen::MatrixXd ax = a.entries() * x;
  Eigen::MatrixXd core = x.transpose() * ax;
  core = 0.5 * (core + core.transpose());

  // Pseudoinverse with cutoff k * u * sigma_max.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double cutoff = static_cast<double>(k) *
                  std::numeric_limits<double>::epsilon() * 0.5 *
                  svd.singularValues()(0);
  Eigen::VectorXd inv = svd.singularValues();
  for (Eigen::Index i = 0; i < inv.size(); ++i)
    inv(i) = svd.singularValues()(i) > cutoff ? 1.0 / svd.singularValues()(i)
                                              : 0.0;
  Eigen::MatrixXd pinv =
      svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();

  Eigen::JacobiSVD<Eigen::MatrixXd> outer(ax * pinv);
  return outer.singularValues()(0);
}

double eta_ratio(const SpdMatrix& a, const Eigen::MatrixXd& x) {
  check_x(a, x);
  const Eigen::Index k = x.cols();
  Eigen::MatrixXd xa = x.transpose() * sqrt_psd(a);  // k x n
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(xa);
  double sigma_k = svd.singularValues()(k - 1);
  double lambda_k = a.spectrum()(k - 1);
  double tiny =
      svd.singularValues()(0) * std::numeric_limits<double>::epsilon() * k;
  if (sigma_k <= tiny) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::max(lambda_k, 0.0)) / sigma_k;
}

PseudoinvNormBounds pseudoinv_norm_bounds(const SpdMatrix& a, const Eigen::MatrixXd& x, int k,
                         double alpha) {
  check_x(a, x);
  if (x.cols() != k)
    throw std::invalid_argument("pseudoinv_norm_bounds: X must have exactly k columns");
  if (!(alpha > 0) || !(alpha < 1))
    throw std::invalid_argument("pseudoinv_norm_bounds: alpha must be in (0,1)");

  const Eigen::VectorXd& eigs = a.spectrum();
  double lambda_k = eigs(k - 1);
  if (!(lambda_k > 0))
    throw numeric_error("pseudoinv_norm_bounds: lambda_k is not positive (rank < k)");
  double kappa_sqrt = std::sqrt(eigs(0) / lambda_k);

  PseudoinvNormBounds b;
  b.alpha = alpha;
  b.deterministic = kappa_sqrt * eta_ratio(a, x);
  b.probabilistic = kappa_sqrt * std::sqrt(static_cast<double>(k)) / alpha;
  b.failure_probability = alpha;  // c1 * alpha with c1 = 1
  return b;
}

PartitionedBound partitioned_bound(const SpdMatrix& a, int k, double alpha) {
  if (k < 1 || k > a.n())
    throw std::invalid_argument("partitioned_bound: need 1 <= k <= n");
  if (!(alpha > 0) || !(alpha < 1))
    throw std::invalid_argument("partitioned_bound: alpha must be in (0,1)");

  const Eigen::VectorXd& eigs = a.spectrum();
  double lmax = eigs(0);
  double cutoff = a.n() * std::numeric_limits<double>::epsilon() * 0.5 * lmax;
  int rank = 0;
  while (rank < a.n() && eigs(rank) > cutoff) ++rank;
  if (rank < k) {
    std::ostringstream msg;
    msg << "partitioned_bound: numeric rank " << rank << " is below k = " << k;
    throw numeric_error(msg.str());
  }

  PartitionedBound pb;
  pb.blocks = rank / k;
  double sum = 0;
  for (int i = 1; i <= pb.blocks; ++i) sum += eigs(i * k - 1);
  pb.bound = std::sqrt(lmax) * std::sqrt(static_cast<double>(k)) /
             (alpha * std::sqrt(sum));
  pb.failure_probability = pb.blocks * alpha;
  return pb;
}

FiniteTermBound finite_term_bound(const SpdMatrix& a, int k,
                                const FloatFormat& up, double alpha, double t,
                                double c) {
  if (k < 1 || k > a.n())
    throw std::invalid_argument("finite_term_bound: need 1 <= k <= n");
  if (!(alpha > 0) || !(alpha < 1) || !(t > 0))
    throw std::invalid_argument("finite_term_bound: bad alpha or t");

  const int n = a.n();
  GammaFactors g = gamma_factors(n, up, c);
  if (!g.valid) {
    std::ostringstream msg;
    msg << "finite_term_bound: rounding theory out of range for " << up.name
        << " at n = " << n;
    throw numeric_error(msg.str());
  }
  const Eigen::VectorXd& eigs = a.spectrum();
  double lambda_k = eigs(k - 1);
  if (!(lambda_k > 0))
    throw numeric_error("finite_term_bound: lambda_k is not positive");

  double sn = std::sqrt(static_cast<double>(n));
  double skk = std::sqrt(static_cast<double>(k));
  double head = (sn + skk + t) * (sn + skk + t);

  FiniteTermBound tt;
  tt.term = (1.0 / alpha) * sn * k * head * g.gamma_tilde * eigs(0) *
            (eigs(0) / lambda_k);
  tt.failure_probability = std::exp(-0.5 * t * t) + alpha;
  return tt;
}

double expected_exact_error_bound(const Eigen::VectorXd& eigs, int k) {
  const int n = static_cast<int>(eigs.size());
  if (k < 4 || k > n)
    throw std::invalid_argument(
        "expected_exact_error_bound: need 4 <= k <= n");

  // Suffix sums once, then scan the admissible p range.
  Eigen::VectorXd suffix(n + 1);
  suffix(n) = 0;
  for (int i = n - 1; i >= 0; --i) suffix(i) = suffix(i + 1) + eigs(i);

  double best = std::numeric_limits<double>::infinity();
  const double e2 = std::exp(2.0);
  for (int p = 2; p <= k - 2; ++p) {
    double head = (1.0 + 2.0 * (k - p) / (p - 1.0)) * eigs(k - p);  // lambda_{k-p+1}
    double tail = (2.0 * e2 * k / (p * p - 1.0)) * suffix(k - p);
    best = std::min(best, head + tail);
  }
  return best;
}

HeuristicCheck heuristic_check(const Eigen::VectorXd& eigs, int k,
                               const FloatFormat& up) {
  const int n = static_cast<int>(eigs.size());
  if (k < 1 || k >= n)
    throw std::invalid_argument("heuristic_check: need 1 <= k < n");
  HeuristicCheck h;
  h.ratio = eigs(k) / eigs(0);
  h.threshold = std::sqrt(static_cast<double>(n)) * up.unit_roundoff;
  h.flag = h.ratio <= h.threshold;
  return h;
}

}  // namespace nymp

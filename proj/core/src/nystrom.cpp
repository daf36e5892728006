#include "nymp/nystrom.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "nymp/errors.hpp"
#include "nymp/rng.hpp"

namespace nymp {

namespace {

// Upper-triangular Cholesky factor of a symmetric matrix, S = C^T C.
// Hand-rolled so a breakdown can report which pivot failed.
Eigen::MatrixXd chol_upper(const Eigen::MatrixXd& s) {
  const Eigen::Index n = s.rows();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = s(j, j) - c.col(j).head(j).squaredNorm();
    if (!(d > 0)) {
      std::ostringstream msg;
      msg << "Cholesky breakdown at pivot " << j + 1 << " of " << n
          << " (value " << d << "); the sketch product is not numerically "
          << "positive definite";
      throw numeric_error(msg.str());
    }
    c(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double off = s(j, i) - c.col(j).head(j).dot(c.col(i).head(j));
      c(j, i) = off / c(j, j);
    }
  }
  return c;
}

}  // namespace

SketchMatrix draw_sketch(int n, int k, int l, std::uint64_t seed) {
  if (k < 1 || l < 0 || k + l > n)
    throw std::invalid_argument("draw_sketch: need 1 <= k, 0 <= l, k+l <= n");
  const int cols = k + l;

  for (int attempt = 0; attempt < 3; ++attempt) {
    // Probability-zero retry path; the offset keeps retried streams away
    // from neighbouring seeds.
    std::uint64_t s = seed + (static_cast<std::uint64_t>(attempt) << 32);
    RandomStream rng(s);
    Eigen::MatrixXd g = rng.gaussian_matrix(n, cols);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::VectorXd rdiag =
        qr.matrixQR().topLeftCorner(cols, cols).diagonal().cwiseAbs();
    if (rdiag.minCoeff() >
        cols * std::numeric_limits<double>::epsilon() * rdiag.maxCoeff()) {
      SketchMatrix sk;
      sk.q = qr.householderQ() * Eigen::MatrixXd::Identity(n, cols);
      sk.k = k;
      sk.l = l;
      sk.seed = seed;
      return sk;
    }
  }
  throw numeric_error("draw_sketch: rank-deficient gaussian draw three times");
}

NystromApprox nystrom_approx(const SpdMatrix& a, int k, int l,
                             const FloatFormat& up, MatmulMode mode,
                             std::uint64_t seed) {
  const int n = a.n();
  if (k < 1 || l < 0 || k + l > n)
    throw std::invalid_argument(
        "nystrom_approx: need 1 <= k, 0 <= l, k+l <= n");

  SketchMatrix sk = draw_sketch(n, k, l, seed);
  const Eigen::MatrixXd& q = sk.q;

  // The one step evaluated in the simulated precision.
  Eigen::MatrixXd y = matmul_lowprec(a.entries(), q, up, mode);
  if (!y.allFinite())
    throw numeric_error(
        "nystrom_approx: sketch product overflowed to inf/nan");

  // Stabilization shift, removed from the eigenvalues at the end.
  double nu = 2.0 * up.unit_roundoff * y.norm();
  Eigen::MatrixXd y_nu = y + nu * q;

  Eigen::MatrixXd b = q.transpose() * y_nu;
  Eigen::MatrixXd c = chol_upper(0.5 * (b + b.transpose()));

  // F = Y_nu * C^-1 via C^T Z = Y_nu^T.
  Eigen::MatrixXd f = c.transpose()
                          .triangularView<Eigen::Lower>()
                          .solve(y_nu.transpose())
                          .transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(f, Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success)
    throw numeric_error("nystrom_approx: SVD did not converge");

  NystromApprox out;
  out.u = svd.matrixU().leftCols(k);
  out.theta = (svd.singularValues().head(k).array().square() - nu)
                  .max(0.0)
                  .matrix();
  out.nu = nu;
  out.k = k;
  out.l = l;
  out.up = up;
  out.mode = mode;
  out.seed = seed;
  return out;
}

SpdMatrix reconstruct(const NystromApprox& approx) {
  std::ostringstream detail;
  detail << "nystrom k=" << approx.k << " l=" << approx.l << " up="
         << approx.up.name << " mode=" << to_string(approx.mode)
         << " seed=" << approx.seed;
  return SpdMatrix::from_psd_factors(approx.u, approx.theta,
                                     {Provenance::Kind::Derived,
                                      detail.str()});
}

ApproxErrors approx_errors(const SpdMatrix& a, const NystromApprox& approx,
                           const NystromApprox* reference) {
  if (a.n() != approx.u.rows())
    throw std::invalid_argument("approx_errors: dimension mismatch");

  Eigen::MatrixXd ahat =
      approx.u * approx.theta.asDiagonal() * approx.u.transpose();

  ApproxErrors err;
  err.total = spectral_norm(a.entries() - ahat);
  if (reference != nullptr) {
    if (reference->k != approx.k || reference->l != approx.l ||
        reference->seed != approx.seed || reference->mode != approx.mode)
      throw std::invalid_argument(
          "approx_errors: reference run does not share (k, l, seed, mode)");
    if (!reference->up.is_working_precision())
      throw std::invalid_argument(
          "approx_errors: reference run must be working precision");
    Eigen::MatrixXd aref =
        reference->u * reference->theta.asDiagonal() * reference->u.transpose();
    err.finite = spectral_norm(aref - ahat);
  }
  return err;
}

void save_approx(const NystromApprox& approx, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw config_error("cannot write approximation file '" + path +
                               "'");
  const Eigen::Index n = approx.u.rows(), k = approx.u.cols();
  std::fprintf(out, "nymp-nystrom 1\n");
  std::fprintf(out, "n %" PRIdPTR " k %" PRIdPTR " l %d\n",
               static_cast<intptr_t>(n), static_cast<intptr_t>(k), approx.l);
  std::fprintf(out, "up %s mode %s seed %" PRIu64 "\n", approx.up.name.c_str(),
               to_string(approx.mode), approx.seed);
  std::fprintf(out, "nu %.17g\n", approx.nu);
  for (Eigen::Index i = 0; i < k; ++i)
    std::fprintf(out, "%.17g\n", approx.theta(i));
  // U in column-major order.
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      std::fprintf(out, "%.17g\n", approx.u(i, j));
  std::fclose(out);
}

NystromApprox load_approx(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open approximation file '" + path + "'");

  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "nymp-nystrom" || version != 1)
    throw config_error(path + ": not a nymp-nystrom v1 file");

  NystromApprox approx;
  std::string key, up_name, mode_name;
  long n = 0, k = 0;
  in >> key >> n >> key >> k >> key >> approx.l;
  in >> key >> up_name >> key >> mode_name >> key >> approx.seed;
  in >> key >> approx.nu;
  if (!in || n < 1 || k < 1 || k > n)
    throw config_error(path + ": malformed header");
  approx.up = builtin_format(up_name);
  approx.mode = matmul_mode_from_string(mode_name);
  approx.k = static_cast<int>(k);

  approx.theta.resize(k);
  for (long i = 0; i < k; ++i) in >> approx.theta(i);
  approx.u.resize(n, k);
  for (long j = 0; j < k; ++j)
    for (long i = 0; i < n; ++i) in >> approx.u(i, j);
  if (!in) throw config_error(path + ": truncated data section");
  return approx;
}

}  // namespace nymp

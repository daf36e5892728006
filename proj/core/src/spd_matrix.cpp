#include "nymp/spd_matrix.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nymp/errors.hpp"

namespace nymp {

struct SpdMatrix::Cache {
  std::once_flag once;
  Eigen::VectorXd spectrum;  // descending
};

SpdMatrix::SpdMatrix(Eigen::MatrixXd entries, Provenance prov)
    : entries_(std::move(entries)),
      prov_(std::move(prov)),
      cache_(std::make_shared<Cache>()) {}

namespace {

Eigen::VectorXd eig_descending(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw numeric_error("symmetric eigensolver did not converge");
  return es.eigenvalues().reverse();
}

}  // namespace

SpdMatrix SpdMatrix::from_dense(Eigen::MatrixXd entries, Provenance prov) {
  if (entries.rows() != entries.cols())
    throw std::invalid_argument("SpdMatrix: matrix must be square");
  if (!entries.allFinite())
    throw std::invalid_argument("SpdMatrix: entries must be finite");
  Eigen::MatrixXd sym = 0.5 * (entries + entries.transpose());
  SpdMatrix a(std::move(sym), std::move(prov));
  const Eigen::VectorXd& eigs = a.spectrum();  // also fills the cache
  double lmax = eigs(0), lmin = eigs(a.n() - 1);
  if (lmin < -kPsdTol * std::max(lmax, 0.0)) {
    std::ostringstream msg;
    msg << "matrix '" << a.prov_.detail << "' is not positive semidefinite: "
        << "lambda_min = " << lmin << ", lambda_max = " << lmax;
    throw numeric_error(msg.str());
  }
  return a;
}

SpdMatrix SpdMatrix::from_psd_factors(const Eigen::MatrixXd& u,
                                      const Eigen::VectorXd& theta,
                                      Provenance prov) {
  if (u.cols() != theta.size())
    throw std::invalid_argument("SpdMatrix: factor dimensions differ");
  if (theta.size() > 0 && theta.minCoeff() < 0)
    throw std::invalid_argument("SpdMatrix: theta must be nonnegative");
  Eigen::MatrixXd m = u * theta.asDiagonal() * u.transpose();
  // The product is symmetric up to roundoff; make it exact.
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  return SpdMatrix(std::move(sym), std::move(prov));
}

const Eigen::VectorXd& SpdMatrix::spectrum() const {
  std::call_once(cache_->once,
                 [&] { cache_->spectrum = eig_descending(entries_); });
  return cache_->spectrum;
}

double spectral_norm(const Eigen::MatrixXd& sym) {
  auto [lo, hi] = eig_range(sym);
  return std::max(std::abs(lo), std::abs(hi));
}

std::pair<double, double> eig_range(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw numeric_error("symmetric eigensolver did not converge");
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

}  // namespace nymp

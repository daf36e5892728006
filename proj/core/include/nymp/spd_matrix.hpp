#pragma once

#include <memory>
#include <mutex>
#include <string>

#include <Eigen/Dense>

namespace nymp {

// Where a matrix came from; carried through reports so result rows can name
// their problem.
struct Provenance {
  enum class Kind { Synthetic, Kernel, File, Derived };
  Kind kind = Kind::Derived;
  std::string detail;  // e.g. "polydecay p=1 n=100 r=10 beta=1e2", file path
};

// Dense symmetric positive semidefinite matrix with a cached spectrum.
// Construction symmetrizes the entries ((M + M^T)/2) and, for untrusted
// sources, rejects matrices with lambda_min < -1e-10 * lambda_max.
// The entries are immutable after construction; copies share the spectrum
// cache, which is populated once under a mutex on first use.
class SpdMatrix {
 public:
  static constexpr double kPsdTol = 1e-10;

  // Symmetrize, eigendecompose, and verify PSD-ness (throws numeric_error
  // with the offending lambda_min otherwise).  The spectrum cache is filled
  // as a side effect.
  static SpdMatrix from_dense(Eigen::MatrixXd entries, Provenance prov);

  // Assemble U * diag(theta) * U^T, PSD by construction (theta must be
  // entrywise nonnegative); skips the eigendecomposition check.
  static SpdMatrix from_psd_factors(const Eigen::MatrixXd& u,
                                    const Eigen::VectorXd& theta,
                                    Provenance prov);

  int n() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  const Provenance& provenance() const { return prov_; }

  // Eigenvalues in descending order (cached; computed on first call).
  const Eigen::VectorXd& spectrum() const;
  double norm2() const { return std::abs(spectrum()(0)); }
  double lambda_min() const { return spectrum()(n() - 1); }

 private:
  SpdMatrix(Eigen::MatrixXd entries, Provenance prov);

  struct Cache;
  Eigen::MatrixXd entries_;
  Provenance prov_;
  std::shared_ptr<Cache> cache_;
};

// Spectral norm of a general symmetric matrix (max |eigenvalue|), used for
// error measurements.  Throws numeric_error if the eigensolver fails.
double spectral_norm(const Eigen::MatrixXd& sym);

// Extreme eigenvalues (min, max) of a symmetric matrix.
std::pair<double, double> eig_range(const Eigen::MatrixXd& sym);

}  // namespace nymp

#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "nymp/spd_matrix.hpp"

namespace nymp {

// Families of synthetic SPD test problems.  All are n x n with r leading
// eigenvalues equal to beta:
//   ExpDecay:  diag(beta*ones(r), 10^-q, 10^-2q, ..., 10^-(n-r)q)
//   PolyDecay: diag(beta*ones(r), 2^-p, 3^-p, ..., (n-r+1)^-p)
//   PsdNoise:  diag(beta*ones(r), 0, ..., 0) + xi * n^-1 * G G^T,  G gaussian
enum class SyntheticKind { ExpDecay, PolyDecay, PsdNoise };

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::PolyDecay;
  int n = 100;
  int r = 10;
  double beta = 1.0;
  double decay = 1.0;       // q, p, or xi depending on kind (xi may be 0)
  std::uint64_t seed = 1;   // used by PsdNoise only
};

SpdMatrix gen_synthetic(const SyntheticSpec& spec);

// Gaussian kernel matrix A_ij = exp(-||y_i - y_j||^2 / (2 sigma^2)) from the
// rows of `features`.  sigma must be positive and the features finite.
SpdMatrix gen_gaussian_kernel(const Eigen::MatrixXd& features, double sigma);

}  // namespace nymp

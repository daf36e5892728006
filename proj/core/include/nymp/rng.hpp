#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace nymp {

// Deterministic scalar random streams.  Built on std::mt19937_64 (whose
// output sequence is fixed by the standard) with explicit uniform and
// Box-Muller transforms, so the streams do not depend on the C++ library's
// unspecified distribution implementations.  Given one toolchain the
// streams are bit-reproducible; across toolchains they can differ only in
// the last ulp of libm's log/cos/sin.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  // Uniform on the open interval (0,1): (bits >> 11 + 0.5) * 2^-53.
  double uniform01() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
  }

  // Standard normal via Box-Muller; the second variate of each pair is
  // cached and handed out next.
  double gaussian();

  // Matrices are filled column by column (Eigen's storage order).
  Eigen::MatrixXd gaussian_matrix(int rows, int cols);
  Eigen::MatrixXd uniform_matrix(int rows, int cols);
  Eigen::VectorXd uniform_vector(int n);

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace nymp

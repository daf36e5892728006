#include "nymp/generators.hpp"

#include <cmath>
#include <sstream>

#include "nymp/errors.hpp"
#include "nymp/rng.hpp"

namespace nymp {

namespace {

std::string spec_detail(const SyntheticSpec& s) {
  std::ostringstream os;
  switch (s.kind) {
    case SyntheticKind::ExpDecay:
      os << "expdecay q=" << s.decay;
      break;
    case SyntheticKind::PolyDecay:
      os << "polydecay p=" << s.decay;
      break;
    case SyntheticKind::PsdNoise:
      os << "psdnoise xi=" << s.decay << " seed=" << s.seed;
      break;
  }
  os << " n=" << s.n << " r=" << s.r << " beta=" << s.beta;
  return os.str();
}

}  // namespace

SpdMatrix gen_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.r < 0 || spec.r > spec.n)
    throw std::invalid_argument("gen_synthetic: need 0 <= r <= n");
  if (spec.beta <= 0)
    throw std::invalid_argument("gen_synthetic: beta must be positive");
  bool needs_positive_decay = spec.kind != SyntheticKind::PsdNoise;
  if (spec.decay < 0 || (needs_positive_decay && spec.decay == 0))
    throw std::invalid_argument("gen_synthetic: decay parameter out of range");

  Eigen::VectorXd d = Eigen::VectorXd::Zero(spec.n);
  d.head(spec.r).setConstant(spec.beta);
  switch (spec.kind) {
    case SyntheticKind::ExpDecay:
      for (int i = spec.r; i < spec.n; ++i)
        d(i) = std::pow(10.0, -spec.decay * (i - spec.r + 1));
      break;
    case SyntheticKind::PolyDecay:
      for (int i = spec.r; i < spec.n; ++i)
        d(i) = std::pow(static_cast<double>(i - spec.r + 2), -spec.decay);
      break;
    case SyntheticKind::PsdNoise:
      break;  // tail stays zero
  }

  Provenance prov{Provenance::Kind::Synthetic, spec_detail(spec)};
  if (spec.kind == SyntheticKind::PsdNoise) {
    RandomStream rng(spec.seed);
    Eigen::MatrixXd g = rng.gaussian_matrix(spec.n, spec.n);
    Eigen::MatrixXd m = d.asDiagonal();
    m += (spec.decay / spec.n) * (g * g.transpose());
    return SpdMatrix::from_dense(std::move(m), std::move(prov));
  }
  return SpdMatrix::from_dense(d.asDiagonal(), std::move(prov));
}

SpdMatrix gen_gaussian_kernel(const Eigen::MatrixXd& features, double sigma) {
  if (!(sigma > 0))
    throw std::invalid_argument("gen_gaussian_kernel: sigma must be positive");
  if (!features.allFinite())
    throw std::invalid_argument(
        "gen_gaussian_kernel: features must be finite");
  const int n = static_cast<int>(features.rows());
  if (n < 1)
    throw std::invalid_argument("gen_gaussian_kernel: need at least one row");

  double inv = 1.0 / (2.0 * sigma * sigma);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 1.0;
    for (int j = 0; j < i; ++j) {
      double d2 = (features.row(i) - features.row(j)).squaredNorm();
      a(i, j) = a(j, i) = std::exp(-d2 * inv);
    }
  }
  std::ostringstream detail;
  detail << "gaussian kernel n=" << n << " d=" << features.cols()
         << " sigma=" << sigma;
  return SpdMatrix::from_dense(std::move(a),
                               {Provenance::Kind::Kernel, detail.str()});
}

}  // namespace nymp

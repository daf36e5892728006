#include "nymp/problems.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include <Eigen/Dense>

#include "nymp/errors.hpp"
#include "nymp/generators.hpp"
#include "nymp/rng.hpp"

namespace nymp {

namespace {

// Generator knobs for one stand-in.  The construction places Gaussian-kernel
// point clusters in 3-d: a few well separated tight clusters give a handful
// of dominant eigenvalues, the within-cluster geometry fills in a ladder of
// mid-spectrum modes, a log-uniform diagonal rescaling spreads those over
// diag_decades decades, and a small ridge pins the tail well below the rest
// of the spectrum.
struct StandinParams {
  int clusters = 3;
  double radius_hi = 0.30;
  double radius_lo = 0.08;
  double diag_decades = 1.2;
  double ridge_rel = 1e-5;
  uint64_t seed = 1;
};

struct RegistryEntry {
  NamedProblem problem;
  StandinParams params;
};

const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> entries = {
      {{"journals", 124, 6.85e4, true, {3, 4, 5, 8, 10, 15}},
       {3, 0.30, 0.08, 1.2, 1e-5, 11}},
      {{"bcsstm07", 420, 2.51e3, true, {4, 5, 8, 10}},
       {3, 0.25, 0.06, 1.4, 1e-6, 122}},
      {{"plat362", 362, 7.74e-1, true, {4, 5, 8, 10}},
       {3, 0.30, 0.08, 1.2, 1e-5, 53}},
      {{"494_bus", 494, 3.00e4, true, {4, 5, 8}},
       {3, 0.25, 0.06, 1.4, 1e-6, 84}},
      {{"nos7", 729, 9.86e6, false, {8, 10, 15, 20, 30}},
       {3, 0.30, 0.08, 1.2, 1e-5, 55}},
      {{"bcsstk22", 138, 5.85e6, false, {3, 4, 5, 8, 10, 15, 20, 30}},
       {3, 0.30, 0.08, 1.2, 1e-5, 16}},
      {{"lfat5", 14, 2.15e7, false, {2, 3, 4, 6, 8}},
       {3, 0.30, 0.08, 1.2, 1e-5, 17}},
  };
  return entries;
}

const RegistryEntry& find_entry(const std::string& name) {
  for (const auto& e : registry()) {
    if (e.problem.name == name) return e;
  }
  throw config_error("unknown builtin problem: " + name);
}

SpdMatrix generate_standin(const NamedProblem& meta, const StandinParams& p) {
  const int n = meta.n;
  RandomStream rng(p.seed);

  Eigen::MatrixXd centers = 3.0 * rng.gaussian_matrix(p.clusters, 3);
  Eigen::VectorXd radius(p.clusters);
  for (int c = 0; c < p.clusters; ++c) {
    double frac = p.clusters == 1 ? 0.0 : double(c) / (p.clusters - 1);
    radius(c) = p.radius_hi * std::pow(p.radius_lo / p.radius_hi, frac);
  }

  Eigen::MatrixXd pts(n, 3);
  for (int i = 0; i < n; ++i) {
    int c = i % p.clusters;
    for (int j = 0; j < 3; ++j)
      pts(i, j) = centers(c, j) + radius(c) * rng.gaussian();
  }
  SpdMatrix kernel = gen_gaussian_kernel(pts, 1.0);

  Eigen::VectorXd dscale(n);
  for (int i = 0; i < n; ++i)
    dscale(i) = std::pow(10.0, -p.diag_decades * rng.uniform01());

  Eigen::MatrixXd m =
      dscale.asDiagonal() * kernel.entries() * dscale.asDiagonal();
  m.diagonal().array() += p.ridge_rel;

  SpdMatrix unscaled = SpdMatrix::from_dense(
      std::move(m), {Provenance::Kind::Synthetic, "standin " + meta.name});
  double s = meta.norm2 / unscaled.norm2();
  return SpdMatrix::from_dense(
      s * unscaled.entries(),
      {Provenance::Kind::Synthetic, "standin " + meta.name});
}

SpdMatrix pseudoinv_example(int which) {
  const int n = 100;
  RandomStream rng(777 + static_cast<uint64_t>(which));
  Eigen::MatrixXd g = rng.uniform_matrix(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd w = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);

  Eigen::VectorXd d(n);
  if (which == 1) {
    for (int i = 0; i < n; ++i) d(i) = rng.uniform01();
  } else {
    for (int i = 0; i < 15; ++i) d(i) = 1e2 * rng.uniform01();
    for (int i = 0; i < 75; ++i) d(15 + i) = 1.0 / (i + 2);
    for (int i = 90; i < n; ++i) d(i) = 0.0;
  }

  Eigen::MatrixXd m = w * d.asDiagonal() * w.transpose();
  return SpdMatrix::from_dense(
      std::move(m),
      {Provenance::Kind::Synthetic, which == 1 ? "pseudoinv example a1" : "pseudoinv example a2"});
}

}  // namespace

const std::vector<NamedProblem>& builtin_problems() {
  static const std::vector<NamedProblem> list = [] {
    std::vector<NamedProblem> v;
    for (const auto& e : registry()) v.push_back(e.problem);
    return v;
  }();
  return list;
}

const NamedProblem& builtin_problem(const std::string& name) {
  return find_entry(name).problem;
}

SpdMatrix make_builtin(const std::string& name) {
  static std::mutex mu;
  static std::map<std::string, SpdMatrix> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  const RegistryEntry& e = find_entry(name);
  SpdMatrix m = generate_standin(e.problem, e.params);
  cache.emplace(name, m);
  return m;
}

SpdMatrix pseudoinv_example_a1() {
  static const SpdMatrix a = pseudoinv_example(1);
  return a;
}

SpdMatrix pseudoinv_example_a2() {
  static const SpdMatrix a = pseudoinv_example(2);
  return a;
}

}  // namespace nymp

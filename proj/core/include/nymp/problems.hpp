#pragma once

#include <string>
#include <vector>

#include "nymp/spd_matrix.hpp"

namespace nymp {

// Registry of the named SPD benchmark problems the experiments run on.
//
// The original SuiteSparse matrices are not redistributed here; each entry is
// a deterministic generated stand-in that reproduces the published dimension
// and spectral norm of its namesake exactly and its broad character
// (nonnegative entries, decaying spectrum with gaps).  half_ok mirrors
// whether ||A||_2 fits comfortably inside fp16's range (the < 1e5 rule used
// throughout the experiments); ks is the per-problem rank grid, placed
// around the stand-in's spectral gaps.
struct NamedProblem {
  std::string name;
  int n = 0;
  double norm2 = 0;
  bool half_ok = false;
  std::vector<int> ks;
};

const std::vector<NamedProblem>& builtin_problems();

// Look up a registry entry (config_error for unknown names).
const NamedProblem& builtin_problem(const std::string& name);

// Generate the stand-in matrix for a registry entry.  Deterministic:
// repeated calls return identical matrices.
SpdMatrix make_builtin(const std::string& name);

// The two dense examples used to exercise the weighted pseudoinverse
// bounds: W from the QR of a uniform random matrix, then
//   a1 = W diag(uniform(0,1) x 100) W^T
//   a2 = W diag(100*uniform(0,1) x 15, 2^-1..76^-1, 0 x 10) W^T
// (a2 has rank 90).  Deterministic.
SpdMatrix pseudoinv_example_a1();
SpdMatrix pseudoinv_example_a2();

}  // namespace nymp

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nymp/generators.hpp"
#include "nymp/lowprec_product.hpp"
#include "nymp/spd_matrix.hpp"

namespace nymp {

// One problem a sweep runs over.  Sources:
//   builtin:<name>                          registry stand-in
//   mtx:<path>                              Matrix Market file
//   kernel:<path>,sigma=<s>                 gaussian kernel on CSV features
//   expdecay:/polydecay:/psdnoise:<params>  synthetic spec
struct ProblemRef {
  std::string name;
  struct Builtin { std::string id; };
  struct MtxFile { std::string path; };
  struct KernelCsv { std::string path; double sigma; };
  std::variant<Builtin, MtxFile, KernelCsv, SyntheticSpec> source;
};

struct ExperimentConfig {
  std::vector<ProblemRef> problems;
  std::vector<int> ks;               // empty: per-problem registry grid
  std::vector<std::string> formats;  // u_p names; fp64 reference always run
  std::vector<double> mus;           // precond experiments only
  std::vector<std::uint64_t> seeds;  // default 1..10
  int oversampling = 0;
  MatmulMode mode = MatmulMode::PerOp;
  std::string output_dir = ".";
  std::uint64_t rhs_seed = 1234;
  double pcg_tol = 1e-6;
};

// Parse the flat key-value config dialect: one `key = value` per line, '#'
// comments, repeated keys accumulate into lists.  Unknown keys, malformed
// values, or out-of-range ranks raise config_error with the line number.
ExperimentConfig parse_config(const std::string& path);

// Parse one problem token ("builtin:nos7", "mtx:a.mtx",
// "kernel:pts.csv,sigma=1.5", "polydecay:n=100,r=10,p=1,beta=100,seed=1").
ProblemRef parse_problem_ref(const std::string& token);

// One grid cell result.  Metric fields are empty when not applicable
// (e.g. proxy outside the gamma regime) and the whole row carries
// status "skipped"/"error" with a note when the cell did not run.
struct ResultRow {
  std::string status = "ok";  // ok | skipped | error
  std::string problem;
  int n = 0;
  int k = 0;
  std::string up;
  std::uint64_t seed = 0;
  std::optional<double> mu;

  std::optional<double> total_error;
  std::optional<double> finite_error;
  std::optional<double> proxy;
  std::optional<double> finite_bound;
  std::optional<double> expected_bound;
  std::optional<double> heuristic_ratio;
  std::optional<double> heuristic_threshold;
  std::optional<bool> heuristic_flag;

  // Preconditioner metrics.
  std::optional<double> kappa_unprec;
  std::optional<double> kappa_prec;
  std::optional<double> b_low;
  std::optional<double> b_upp;
  std::optional<double> b_uppspd;
  std::optional<double> b_low_est;
  std::optional<double> b_upp_est;
  std::optional<double> b_uppspd_est;
  std::optional<double> e_norm;
  std::optional<double> eps_norm;
  std::optional<double> lambda_k_hat;
  // Iteration counts are integral in per-seed rows but fractional in
  // seed-mean aggregates, so both live as doubles.
  std::optional<double> iters;
  std::optional<double> iters_unprec;
  std::optional<bool> converged;

  std::string note;
};

// Seed-mean of every numeric column over the ok rows of one
// (problem, k, up, mu) cell.
struct AggregateRow {
  std::string problem;
  int k = 0;
  std::string up;
  std::optional<double> mu;
  int count = 0;  // contributing seeds
  ResultRow means; // numeric fields hold means; status/seed unused
};

struct ExperimentReport {
  enum class Kind { Approx, Precond };
  Kind kind = Kind::Approx;
  ExperimentConfig config;
  std::vector<ResultRow> rows;
  std::vector<AggregateRow> aggregates;
};

// Approximation-quality sweep: for every (problem, k, u_p, seed) run the
// mixed-precision approximation against the shared fp64 reference and record
// errors, a-priori estimates, and the heuristic verdict.  fp16-family cells
// are pre-skipped when ||A||_2 >= 1e5; other failures (overflow, Cholesky
// breakdown) become row-level error markers rather than aborting the sweep.
ExperimentReport run_approx_experiment(const ExperimentConfig& cfg);

// Preconditioner sweep: additionally builds the limited-memory
// preconditioner per mu, measures the preconditioned condition number,
// evaluates the condition bounds with measured and with estimated norms, and
// runs PCG against the unpreconditioned baseline.
ExperimentReport run_precond_experiment(const ExperimentConfig& cfg);

// Write <dir>/rows.csv and <dir>/aggregates.csv: fixed column order, header
// row, floats at 17 significant digits, rows in grid order.  Reruns of the
// same config produce byte-identical files.  The environment variable
// NYSTROM_MP_OUTDIR overrides dir when set.  Returns the directory used.
std::string emit_csv(const ExperimentReport& report, const std::string& dir);

// Load a problem reference (shared by experiments and the CLI).
SpdMatrix load_problem(const ProblemRef& ref);

// Spectrum CSV (k, lambda_k) for one matrix.
void emit_spectrum_csv(const SpdMatrix& a, const std::string& path);

}  // namespace nymp

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "nymp/errors.hpp"
#include "nymp/float_format.hpp"
#include "nymp/harness.hpp"
#include "nymp/lmp.hpp"
#include "nymp/lowprec_product.hpp"
#include "nymp/matrix_market.hpp"
#include "nymp/nystrom.hpp"
#include "nymp/pcg.hpp"
#include "nymp/problems.hpp"

namespace {

// A bare path with no kind prefix is taken as a Matrix Market file.
nymp::ProblemRef ref_from_token(const std::string& token) {
  if (token.find(':') == std::string::npos)
    return nymp::parse_problem_ref("mtx:" + token);
  return nymp::parse_problem_ref(token);
}

int run_experiment(bool precond, const std::string& config_path) {
  nymp::ExperimentConfig cfg = nymp::parse_config(config_path);
  nymp::ExperimentReport report = precond
                                      ? nymp::run_precond_experiment(cfg)
                                      : nymp::run_approx_experiment(cfg);
  std::string dir = nymp::emit_csv(report, cfg.output_dir);
  size_t ok = 0, skipped = 0, errors = 0;
  for (const auto& r : report.rows) {
    if (r.status == "ok")
      ++ok;
    else if (r.status == "skipped")
      ++skipped;
    else
      ++errors;
  }
  std::printf(
      "wrote %s/rows.csv, %s/aggregates.csv: %zu rows "
      "(%zu ok, %zu skipped, %zu error), %zu aggregate cells\n",
      dir.c_str(), dir.c_str(), report.rows.size(), ok, skipped, errors,
      report.aggregates.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Single-pass Nystrom approximation with a simulated low-precision "
      "matrix product, error estimates, and the derived limited-memory "
      "preconditioner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string matrix_token;
  std::string problem_token;
  std::string out_path;
  std::string up_name = "fp64";
  std::string mode_name = "perop";
  int k = 0;
  int l = 0;
  std::uint64_t seed = 1;
  double mu = 0.0;
  double tol = 1e-6;
  int max_iter = -1;
  std::uint64_t rhs_seed = 1234;
  bool with_errors = false;
  bool with_precond = false;

  auto* approx = app.add_subcommand(
      "approx", "Run an approximation-quality sweep from a config file");
  approx->add_option("--config", config_path, "experiment config file")
      ->required();

  auto* precond = app.add_subcommand(
      "precond", "Run a preconditioner sweep from a config file");
  precond->add_option("--config", config_path, "experiment config file")
      ->required();

  auto* spectrum = app.add_subcommand(
      "spectrum", "Write the eigenvalue spectrum of a matrix to CSV");
  spectrum
      ->add_option("--matrix", matrix_token,
                   "Matrix Market path or problem spec (builtin:..., "
                   "polydecay:..., kernel:...)")
      ->required();
  spectrum->add_option("--out", out_path, "output CSV path")->required();

  auto* gen = app.add_subcommand(
      "gen", "Materialize a problem matrix as a Matrix Market file");
  gen->add_option("--problem", problem_token, "problem spec")->required();
  gen->add_option("--out", out_path, "output .mtx path")->required();

  auto* factor = app.add_subcommand(
      "factor", "Compute one single-pass approximation of a problem");
  factor->add_option("--problem", problem_token, "problem spec")->required();
  factor->add_option("--k", k, "target rank")->required();
  factor->add_option("--l", l, "oversampling columns");
  factor->add_option("--up", up_name, "product precision (fp64, fp32, fp16, "
                     "fp8e5m2, fp8e4m3)");
  factor->add_option("--mode", mode_name, "rounding mode: perop or roundio");
  factor->add_option("--seed", seed, "sketch seed");
  factor->add_option("--out", out_path, "save the factorization here");
  factor->add_flag("--errors", with_errors,
                   "also report total and finite-precision error norms");

  auto* solve = app.add_subcommand(
      "solve", "Solve (A + mu I) x = b with conjugate gradients");
  solve->add_option("--problem", problem_token, "problem spec")->required();
  solve->add_option("--mu", mu, "diagonal shift");
  solve->add_flag("--precond", with_precond,
                  "use the limited-memory preconditioner (requires --k)");
  solve->add_option("--k", k, "preconditioner rank");
  solve->add_option("--up", up_name, "product precision for the sketch");
  solve->add_option("--l", l, "oversampling columns");
  solve->add_option("--mode", mode_name, "rounding mode: perop or roundio");
  solve->add_option("--seed", seed, "sketch seed");
  solve->add_option("--tol", tol, "relative residual tolerance");
  solve->add_option("--maxiter", max_iter, "iteration cap (-1 for 5n)");
  solve->add_option("--rhs-seed", rhs_seed, "right-hand side seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (approx->parsed()) return run_experiment(false, config_path);
    if (precond->parsed()) return run_experiment(true, config_path);

    if (spectrum->parsed()) {
      nymp::SpdMatrix a = nymp::load_problem(ref_from_token(matrix_token));
      nymp::emit_spectrum_csv(a, out_path);
      std::printf("wrote %s: %d eigenvalues, ||A||_2 = %.17g\n",
                  out_path.c_str(), a.n(), a.norm2());
      return 0;
    }

    if (gen->parsed()) {
      nymp::SpdMatrix a = nymp::load_problem(ref_from_token(problem_token));
      nymp::save_matrix_market(a, out_path);
      std::printf("wrote %s: n = %d, ||A||_2 = %.17g\n", out_path.c_str(),
                  a.n(), a.norm2());
      return 0;
    }

    if (factor->parsed()) {
      nymp::SpdMatrix a = nymp::load_problem(ref_from_token(problem_token));
      nymp::FloatFormat fmt = nymp::builtin_format(up_name);
      nymp::MatmulMode mode = nymp::matmul_mode_from_string(mode_name);
      nymp::NystromApprox ap = nymp::nystrom_approx(a, k, l, fmt, mode, seed);
      std::printf("n = %d, k = %d, l = %d, up = %s, mode = %s, seed = %llu\n",
                  a.n(), ap.k, ap.l, fmt.name.c_str(),
                  nymp::to_string(mode),
                  static_cast<unsigned long long>(seed));
      std::printf("nu = %.17g, theta_1 = %.17g, theta_k = %.17g\n", ap.nu,
                  ap.theta(0), ap.theta(ap.theta.size() - 1));
      if (with_errors) {
        if (fmt.is_working_precision()) {
          nymp::ApproxErrors errs = nymp::approx_errors(a, ap);
          std::printf("total error = %.17g\n", errs.total);
        } else {
          nymp::NystromApprox ref = nymp::nystrom_approx(
              a, k, l, nymp::builtin_format("fp64"), mode, seed);
          nymp::ApproxErrors errs = nymp::approx_errors(a, ap, &ref);
          std::printf("total error = %.17g, finite error = %.17g\n",
                      errs.total, errs.finite.value());
        }
      }
      if (!out_path.empty()) {
        nymp::save_approx(ap, out_path);
        std::printf("saved to %s\n", out_path.c_str());
      }
      return 0;
    }

    if (solve->parsed()) {
      nymp::SpdMatrix a = nymp::load_problem(ref_from_token(problem_token));
      nymp::PcgConfig pc;
      pc.mu = mu;
      pc.tol = tol;
      pc.max_iter = max_iter;
      Eigen::VectorXd b = nymp::rhs_uniform(a.n(), rhs_seed);

      nymp::PcgResult res;
      if (with_precond) {
        if (k < 1)
          throw nymp::config_error("--precond requires --k >= 1");
        nymp::FloatFormat fmt = nymp::builtin_format(up_name);
        nymp::MatmulMode mode = nymp::matmul_mode_from_string(mode_name);
        nymp::NystromApprox ap =
            nymp::nystrom_approx(a, k, l, fmt, mode, seed);
        nymp::LmpPreconditioner p = nymp::LmpPreconditioner::build(ap, mu);
        res = nymp::pcg_solve(a, b, &p, pc);
      } else {
        res = nymp::pcg_solve(a, b, nullptr, pc);
      }
      std::printf("iterations = %d, converged = %s, relres = %.17g\n",
                  res.iterations, res.converged ? "yes" : "no", res.relres);
      return res.converged ? 0 : 2;
    }
  } catch (const nymp::config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

// Microbenchmarks for the hot paths: scalar rounding, the simulated
// low-precision matrix product in both fidelity modes, the full
// approximation pipeline, and preconditioner application.
//
//   ./build/benchmarks/nymp_bench                        # everything
//   ./build/benchmarks/nymp_bench --benchmark_filter=matmul

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "nymp/float_format.hpp"
#include "nymp/generators.hpp"
#include "nymp/lmp.hpp"
#include "nymp/lowprec_product.hpp"
#include "nymp/nystrom.hpp"
#include "nymp/rng.hpp"
#include "nymp/spd_matrix.hpp"

namespace {

using namespace nymp;

SpdMatrix bench_matrix(int n) {
  SyntheticSpec s;
  s.kind = SyntheticKind::PolyDecay;
  s.n = n;
  s.r = 10;
  s.decay = 1.0;
  s.beta = 100.0;
  return gen_synthetic(s);
}

void bm_round_to(benchmark::State& state, const char* fmt_name) {
  FloatFormat fmt = builtin_format(fmt_name);
  RandomStream rng(7);
  Eigen::MatrixXd vals = rng.gaussian_matrix(1024, 1);
  for (auto _ : state) {
    double acc = 0;
    for (int i = 0; i < vals.rows(); ++i) acc += round_to(vals(i, 0), fmt);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * vals.rows());
}
BENCHMARK_CAPTURE(bm_round_to, fp16, "fp16");
BENCHMARK_CAPTURE(bm_round_to, fp32, "fp32");
BENCHMARK_CAPTURE(bm_round_to, fp64, "fp64");

void bm_matmul(benchmark::State& state, const char* fmt_name,
               MatmulMode mode) {
  const int n = static_cast<int>(state.range(0));
  FloatFormat fmt = builtin_format(fmt_name);
  RandomStream rng(11);
  Eigen::MatrixXd a = rng.gaussian_matrix(n, n);
  Eigen::MatrixXd b = rng.gaussian_matrix(n, 16);
  for (auto _ : state) {
    Eigen::MatrixXd c = matmul_lowprec(a, b, fmt, mode);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * n * n * 16);
}
BENCHMARK_CAPTURE(bm_matmul, fp16_per_op, "fp16", MatmulMode::PerOp)
    ->Arg(64)
    ->Arg(256);
BENCHMARK_CAPTURE(bm_matmul, fp16_round_io, "fp16", MatmulMode::RoundIO)
    ->Arg(64)
    ->Arg(256);
BENCHMARK_CAPTURE(bm_matmul, fp64_per_op, "fp64", MatmulMode::PerOp)
    ->Arg(64)
    ->Arg(256);

void bm_nystrom(benchmark::State& state, const char* fmt_name) {
  const int n = static_cast<int>(state.range(0));
  SpdMatrix a = bench_matrix(n);
  FloatFormat fmt = builtin_format(fmt_name);
  for (auto _ : state) {
    NystromApprox ap = nystrom_approx(a, 20, 0, fmt, MatmulMode::PerOp, 1);
    benchmark::DoNotOptimize(ap.theta.data());
  }
}
BENCHMARK_CAPTURE(bm_nystrom, fp16, "fp16")->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(bm_nystrom, fp64, "fp64")->Arg(128)->Arg(256);

void bm_lmp_apply_inv(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SpdMatrix a = bench_matrix(n);
  NystromApprox ap =
      nystrom_approx(a, 20, 0, builtin_format("fp64"), MatmulMode::PerOp, 1);
  LmpPreconditioner p = LmpPreconditioner::build(ap, 0.5);
  RandomStream rng(3);
  Eigen::VectorXd x = rng.gaussian_matrix(n, 1);
  for (auto _ : state) {
    Eigen::VectorXd y = p.apply_inv(x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(bm_lmp_apply_inv)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "dualgrad/experiments.hpp"
#include "dualgrad/mittag_leffler.hpp"

using namespace dualgrad;

namespace {

void BM_IntegralOperatorApply(benchmark::State& state) {
  const Grid1D g(static_cast<int>(state.range(0)));
  const LinearMap op = integral_operator(&kernel_ex1, g);
  Eigen::VectorXd x = Eigen::VectorXd::Random(g.nodes());
  for (auto _ : state) {
    Eigen::VectorXd y = op.apply(x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_IntegralOperatorApply)->Arg(100)->Arg(400);

void BM_DualStepNonneg(benchmark::State& state) {
  const Grid1D g(400);
  const LinearMap op = integral_operator(&kernel_ex1, g);
  const DualPenalty pen = nonneg_penalty();
  const Eigen::VectorXd ybar = Eigen::VectorXd::Random(g.nodes());
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(g.nodes());
  const double gamma = 0.1;
  for (auto _ : state) {
    StepResult s = dual_step(lambda, op, pen, ybar, gamma);
    benchmark::DoNotOptimize(s.residual);
  }
}
BENCHMARK(BM_DualStepNonneg);

void BM_MittagLeffler(benchmark::State& state) {
  const double z = -static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mittag_leffler(0.5, z));
  }
}
BENCHMARK(BM_MittagLeffler)->Arg(1)->Arg(10)->Arg(1000);

void BM_Dst2(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const Field2D v = Field2D::Random(N - 1, N - 1);
  for (auto _ : state) {
    Field2D w = dst2(v);
    benchmark::DoNotOptimize(w.data());
  }
}
BENCHMARK(BM_Dst2)->Arg(16)->Arg(64);

void BM_FracDiffBuild(benchmark::State& state) {
  for (auto _ : state) {
    LinearMap op = build_fracdiff_operator({static_cast<int>(state.range(0)), 0.5, 0.1});
    benchmark::DoNotOptimize(&op);
  }
}
BENCHMARK(BM_FracDiffBuild)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SolverRunEx1(benchmark::State& state) {
  ExperimentSpec spec = builtin_spec(ExperimentId::ex1);
  spec.m = 100;
  const Problem prob = assemble_problem(spec);
  const auto ens = generate_ensemble(prob.data_space, prob.y_exact, spec.noise,
                                     state.range(0), 42);
  SolverConfig cfg;
  cfg.gamma = prob.gamma;
  for (auto _ : state) {
    SolverRun r = run(prob.op, prob.penalty, ens, Discrepancy{10.0, 1.1}, cfg);
    benchmark::DoNotOptimize(r.iterations);
  }
}
BENCHMARK(BM_SolverRunEx1)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

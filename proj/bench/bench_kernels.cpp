// Serial reference vs OpenMP kernels on the hot loops of the experiments.

#include <benchmark/benchmark.h>

#include "lapfol/focal.hpp"
#include "lapfol/kernels.hpp"
#include "lapfol/submetry.hpp"

namespace {

using namespace lapfol;

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_FiberAverages(benchmark::State& state) {
  const auto hopf = make_submetry("s3-hopf");
  const auto pts = sample_grid(*hopf, 500);
  const NumericPolynomial f = PolyFunction::parse(hopf->space_ptr(), "x1^4 x3^2 - 3 x2 x4^3").compiled();
  for (auto _ : state) benchmark::DoNotOptimize(fiber_averages(*hopf, f, pts, 12, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(pts.size()));
}
BENCHMARK(BM_FiberAverages)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EvaluateBasis(benchmark::State& state) {
  const auto s3 = make_space("s3");
  std::vector<NumericPolynomial> basis;
  for (const auto& f : monomial_basis(s3, 6)) basis.push_back(f.compiled());
  const auto pts = sample_grid(*make_submetry("s3-hopf"), 500);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_basis(basis, pts, exec_of(state)));
}
BENCHMARK(BM_EvaluateBasis)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DetScan(benchmark::State& state) {
  const auto cl = make_submetry("s3-clifford");
  const AmbientPoint p = clifford_point(0.4, 0.1, 0.2);
  const FiberChart chart = cl->fiber_at(p);
  const Vec v = horizontal_direction(*cl, chart, p, Vec::Ones(1));
  const auto E = jacobi_fundamental(cl->space_ptr(), {p, v}, l_jacobi_system(chart, p, v), 20.0);
  std::vector<double> ts;
  for (int i = 0; i <= 2000; ++i) ts.push_back(0.01 * i);
  const auto f = [&](double t) { return E->value(t); };
  for (auto _ : state) benchmark::DoNotOptimize(det_scan(f, ts, exec_of(state)));
}
BENCHMARK(BM_DetScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

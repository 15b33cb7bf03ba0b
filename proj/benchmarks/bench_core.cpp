#include "ellip/czd.hpp"
#include "ellip/fields.hpp"
#include "ellip/funcalc.hpp"
#include "ellip/harness.hpp"
#include "ellip/singular.hpp"
#include "ellip/weights.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace ellip;

namespace {

std::shared_ptr<const EllipticOperator> laplacian(int N) {
  return std::make_shared<const EllipticOperator>(EllipticOperator::assemble(CoefficientField::identity(PeriodicGrid(2, N))));
}

std::shared_ptr<const EllipticOperator> mk(int N) {
  return std::make_shared<const EllipticOperator>(EllipticOperator::assemble(meyers_kenig(4.0, PeriodicGrid(2, N))));
}

}  // namespace

static void BM_StencilApply(benchmark::State& state) {
  auto op = mk(static_cast<int>(state.range(0)));
  Eigen::VectorXd x = Eigen::VectorXd::Random(op->size()), y(op->size());
  for (auto _ : state) {
    op->apply(x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * op->size());
}
BENCHMARK(BM_StencilApply)->Arg(64)->Arg(256);

static void BM_HeatSpectral(benchmark::State& state) {
  auto op = laplacian(static_cast<int>(state.range(0)));
  SemigroupEvaluator sg(op);
  Field f = random_smooth_field(op->grid(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(sg.apply(1e-3, f));
}
BENCHMARK(BM_HeatSpectral)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_HeatLanczos(benchmark::State& state) {
  auto op = mk(static_cast<int>(state.range(0)));
  SemigroupEvaluator sg(op);
  Field f = random_smooth_field(op->grid(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(sg.apply(1e-3, f));
}
BENCHMARK(BM_HeatLanczos)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_RieszMeyersKenig(benchmark::State& state) {
  auto op = mk(static_cast<int>(state.range(0)));
  SemigroupOptions so;
  so.krylov_tol = 1e-6;
  SemigroupEvaluator sg(op, so);
  auto tq = TimeQuadrature::for_operator(*op, TimeMeasure::inv_sqrt);
  Field f = random_smooth_field(op->grid(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(riesz_apply(sg, f, tq));
}
BENCHMARK(BM_RieszMeyersKenig)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_HoloCalc(benchmark::State& state) {
  auto op = laplacian(64);
  SemigroupEvaluator sg(op);
  HoloSymbol phi = HoloSymbol::rational(1, 2);
  ContourOptions o;
  o.nodes_per_decade = static_cast<int>(state.range(0));
  Contour c = Contour::for_operator(sg, phi.mu, o);
  EtaTable table = tabulate(phi, c);
  Field f = random_smooth_field(op->grid(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(holo_calc(sg, table, f));
}
BENCHMARK(BM_HoloCalc)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_ApConstant(benchmark::State& state) {
  PeriodicGrid g(2, static_cast<int>(state.range(0)));
  WeightField w = WeightField::power(g, 1.0);
  BallFamily fam = BallFamily::standard(g);
  for (auto _ : state) benchmark::DoNotOptimize(ap_constant(w, ExponentValue(2), fam));
}
BENCHMARK(BM_ApConstant)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_CZDecompose(benchmark::State& state) {
  PeriodicGrid g(2, static_cast<int>(state.range(0)));
  Field f = random_smooth_field(g, 3, 6);
  WeightField w = WeightField::unweighted(g);
  double alpha = 2.0 * gradient_magnitude(g, f).mean();
  for (auto _ : state) benchmark::DoNotOptimize(cz_decompose(f, w, ExponentValue(2), alpha));
}
BENCHMARK(BM_CZDecompose)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_EstimateNorm(benchmark::State& state) {
  auto op = laplacian(32);
  SemigroupEvaluator sg(op);
  auto tq = TimeQuadrature::for_operator(*op, TimeMeasure::inv_sqrt);
  WeightField w = WeightField::power(op->grid(), 1.0);
  NormBudget b;
  b.probes = 8;
  b.max_iterations = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_norm(NormTarget::riesz(sg, tq), 3.0, w, b));
}
BENCHMARK(BM_EstimateNorm)->Arg(0)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

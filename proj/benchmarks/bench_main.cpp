#include <benchmark/benchmark.h>

#include <random>

#include "jolopt/data.hpp"
#include "jolopt/geometry.hpp"
#include "jolopt/opf.hpp"
#include "jolopt/retail.hpp"
#include "jolopt/solver.hpp"
#include "jolopt/synthetic.hpp"

using namespace jolopt;

namespace {

Vector random_point(Eigen::Index dim, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal(rng);
  return v;
}

void BM_BoxProjection(benchmark::State& state) {
  const auto dim = static_cast<Eigen::Index>(state.range(0));
  const auto region = FeasibleRegion::box(Vector::Constant(dim, -1.0), Vector::Constant(dim, 1.0));
  const Vector point = random_point(dim, 2.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(region.project(point));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BoxProjection)->RangeMultiplier(8)->Range(8, 1 << 15)->Complexity();

// dispatch region of the default synthetic OPF instance, point pushed well outside
void BM_OpfDykstra(benchmark::State& state) {
  const auto inst = data::generate_opf_synthetic({}).instance;
  const Vector theta = opf::fit_solar_closed_form(inst, 1e-4);
  const auto region = opf::dispatch_region(inst, theta, {.tol = 1e-8, .max_sweeps = 200000});
  const Vector point = random_point(region.dim(), 80.0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(region.project(point, 1e-8, 200000));
}
BENCHMARK(BM_OpfDykstra)->Unit(benchmark::kMillisecond);

void BM_MsloFractional(benchmark::State& state) {
  const auto problem = synthetic::make_fractional_problem();
  SolverConfig cfg;
  cfg.outer_steps = static_cast<unsigned>(state.range(0));
  cfg.inner_steps = static_cast<unsigned>(state.range(0));
  cfg.stop.max_global_iters = 1000;
  cfg.record_every = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(run_mslo(problem, cfg));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_MsloFractional)->Arg(1)->Arg(15);

void BM_MsloRetail(benchmark::State& state) {
  const auto inst = data::generate_logit_dataset({}).instance;
  const auto problem = retail::build_problem(inst);
  SolverConfig cfg;
  cfg.outer_steps = static_cast<unsigned>(state.range(0));
  cfg.inner_steps = static_cast<unsigned>(state.range(1));
  cfg.stop.max_global_iters = 20;
  cfg.record_every = 20;
  for (auto _ : state) benchmark::DoNotOptimize(run_mslo(problem, cfg));
  state.SetItemsProcessed(state.iterations() * 20);
}
BENCHMARK(BM_MsloRetail)->Args({1, 1})->Args({15, 15})->Unit(benchmark::kMillisecond);

void BM_MsloOpf(benchmark::State& state) {
  const auto inst = data::generate_opf_synthetic({}).instance;
  opf::ProblemOptions popt;
  popt.noise.kind = NoiseKind::kNone;
  const auto problem = opf::build_problem(inst, 0.5, 0.5, popt);
  SolverConfig cfg;
  cfg.outer_steps = 15;
  cfg.inner_steps = 1;
  cfg.stop.max_global_iters = 5;
  cfg.record_every = 5;
  cfg.clamp_inner_step = false;
  cfg.projection.max_sweeps = 200000;
  for (auto _ : state) benchmark::DoNotOptimize(run_mslo(problem, cfg));
  state.SetItemsProcessed(state.iterations() * 5);
}
BENCHMARK(BM_MsloOpf)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

// Parallel right-hand side against the serial reference, plus the full
// coupled system on the reference grid.

#include <benchmark/benchmark.h>

#include <cmath>

#include "angio/flux.hpp"
#include "angio/model.hpp"

#ifdef ANGIO_HAVE_OPENMP
#include <omp.h>
#endif

namespace {

using namespace angio;

struct Setup {
  GridSpec g;
  Field2D u;
  AdvectionField adv;
  std::vector<double> rate;
  RhsOptions opt;

  explicit Setup(int n) : g(build_grid(1.0, -1.5, 1.5, n, 3 * n)), u(n, 3 * n) {
    for (int j = -kGhost; j < g.Ny + kGhost; ++j)
      for (int i = -kGhost; i < g.Nx + kGhost; ++i)
        u(i, j) = std::exp(-std::pow((g.x_center(i) - 0.3) / 0.1, 2)) * (1.0 + 0.5 * std::sin(4.0 * g.y_center(j)));
    adv = sample_advection(
        g, [](double x, double y) { return 0.3 + 0.1 * std::sin(x + y); },
        [](double x, double y) { return 0.2 * std::cos(x - y); });
    rate.assign(25 * g.cells(), -0.5);
    opt.dt = 1e-5;
    opt.euler_dt = 3e-5;
  }
};

void BM_ParallelRhs(benchmark::State& state) {
  Setup s(static_cast<int>(state.range(0)));
#ifdef ANGIO_HAVE_OPENMP
  if (state.range(1) > 0) omp_set_num_threads(static_cast<int>(state.range(1)));
#endif
  const SourceTerms src{s.rate, {}, SourceMode::nodal};
  RhsWorkspace ws;
  std::vector<double> out(s.g.cells());
  for (auto _ : state) {
    spatial_rhs(s.u, s.adv, 0.085, src, s.g, s.opt, ws, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.g.cells()));
}

void BM_ReferenceRhs(benchmark::State& state) {
  Setup s(static_cast<int>(state.range(0)));
  const SourceTerms src{s.rate, {}, SourceMode::nodal};
  for (auto _ : state) {
    auto out = reference::spatial_rhs(s.u, s.adv, 0.085, src, s.g, s.opt);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.g.cells()));
}

void BM_CoupledRhs(benchmark::State& state) {
  const model::ModelParams p;
  const GridSpec g = build_grid(1.0, -1.5, 1.5, 50, 150);
  model::CoupledSystem sys(g, p, {});
  sys.set_step(2e-5, 6e-5);
  const auto u = sys.pack(model::initial_state(g, p));
  std::vector<double> r(sys.size());
  for (auto _ : state) {
    sys.rhs(0.0, u, r);
    benchmark::DoNotOptimize(r.data());
  }
}

}  // namespace

BENCHMARK(BM_ParallelRhs)->Args({25, 0})->Args({50, 0})->Args({50, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReferenceRhs)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoupledRhs)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

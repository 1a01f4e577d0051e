#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "gaplab/modal_ode.hpp"
#include "gaplab/solve.hpp"

namespace {

using namespace gaplab;

linalg::CsrMatrix laplacian2d(int m) {
  std::vector<int> ti, tj;
  std::vector<double> tv;
  auto id = [m](int i, int j) { return j * m + i; };
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      ti.push_back(id(i, j));
      tj.push_back(id(i, j));
      tv.push_back(4.0);
      const int di[] = {1, -1, 0, 0};
      const int dj[] = {0, 0, 1, -1};
      for (int s = 0; s < 4; ++s) {
        const int ii = i + di[s], jj = j + dj[s];
        if (ii >= 0 && ii < m && jj >= 0 && jj < m) {
          ti.push_back(id(i, j));
          tj.push_back(id(ii, jj));
          tv.push_back(-1.0);
        }
      }
    }
  }
  return linalg::CsrMatrix::from_triplets(m * m, m * m, ti, tj, tv);
}

void BM_spmv(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto a = laplacian2d(m);
  std::vector<double> x(static_cast<std::size_t>(m * m), 1.0);
  std::vector<double> y(x.size());
  for (auto _ : state) {
    linalg::spmv(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * a.nnz());
}
BENCHMARK(BM_spmv)->Arg(64)->Arg(256)->Arg(512);

void BM_pcg_ssor(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto a = laplacian2d(m);
  std::vector<double> b(static_cast<std::size_t>(m * m), 1.0);
  linalg::SolverOptions opts;
  opts.precond = linalg::Preconditioner::ssor;
  opts.tol = 1e-10;
  opts.max_iter = 20000;
  for (auto _ : state) {
    auto res = linalg::pcg_solve(a, b, opts);
    benchmark::DoNotOptimize(res.x.data());
  }
}
BENCHMARK(BM_pcg_ssor)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_bipolar_assemble(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  geom::BipolarMap map(1e-3);
  auto grid = std::make_shared<geom::CurvilinearGrid>(
      geom::build_bipolar_grid(map, n, n / 2, geom::GradingSpec()));
  pde::DiscreteProblem problem;
  problem.grid = grid;
  problem.coeffs = geom::bipolar_coefficients(*grid, rates::Dimension(3), 1);
  problem.bcs.left = pde::BoundaryCondition::dirichlet_zero();
  problem.bcs.right = pde::BoundaryCondition::dirichlet_zero();
  auto flux = [](double, double, double r, double) { return r; };
  problem.bcs.bottom = pde::BoundaryCondition::neumann(flux);
  problem.bcs.top = pde::BoundaryCondition::neumann(flux);
  for (auto _ : state) {
    auto sys = pde::assemble(problem);
    benchmark::DoNotOptimize(sys.rhs.data());
  }
}
BENCHMARK(BM_bipolar_assemble)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);

void BM_solve_h(benchmark::State& state) {
  ode::ModalOperatorParams params(3, 1e-3, 1);
  ode::ModalSolveOptions opts;
  opts.points_per_octave = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto h = ode::solve_h(params, opts);
    benchmark::DoNotOptimize(h.v.data());
  }
}
BENCHMARK(BM_solve_h)->Arg(96)->Arg(240)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

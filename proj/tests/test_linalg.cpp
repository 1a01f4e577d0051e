#include <cmath>

#include "doctest.h"
#include "gaplab/krylov.hpp"
#include "gaplab/sparse.hpp"
#include "oracles.hpp"

using namespace gaplab;
using linalg::CsrMatrix;
using linalg::Preconditioner;
using linalg::SolverOptions;
using linalg::Tridiagonal;

namespace {

CsrMatrix identity(int n) {
  std::vector<int> i(static_cast<std::size_t>(n)), j(static_cast<std::size_t>(n));
  std::vector<double> v(static_cast<std::size_t>(n), 1.0);
  for (int r = 0; r < n; ++r) {
    i[static_cast<std::size_t>(r)] = r;
    j[static_cast<std::size_t>(r)] = r;
  }
  return CsrMatrix::from_triplets(n, n, i, j, v);
}

// 2D 5-point Laplacian, zero Dirichlet eliminated, grid m x m, spacing 1
CsrMatrix laplacian2d(int m) {
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
        const int ii = i + di[s];
        const int jj = j + dj[s];
        if (ii >= 0 && ii < m && jj >= 0 && jj < m) {
          ti.push_back(id(i, j));
          tj.push_back(id(ii, jj));
          tv.push_back(-1.0);
        }
      }
    }
  }
  return CsrMatrix::from_triplets(m * m, m * m, ti, tj, tv);
}

}  // namespace

TEST_CASE("spmv basics and dense oracle") {
  const CsrMatrix eye = identity(7);
  std::vector<double> x = {1, -2, 3, -4, 5, -6, 7};
  CHECK(linalg::spmv(eye, x) == x);

  // 1D second difference of affine data vanishes in the interior
  const int m = 16;
  std::vector<int> ti, tj;
  std::vector<double> tv;
  for (int i = 0; i < m; ++i) {
    ti.push_back(i); tj.push_back(i); tv.push_back(-2.0);
    if (i > 0) { ti.push_back(i); tj.push_back(i - 1); tv.push_back(1.0); }
    if (i < m - 1) { ti.push_back(i); tj.push_back(i + 1); tv.push_back(1.0); }
  }
  const CsrMatrix pois = CsrMatrix::from_triplets(m, m, ti, tj, tv);
  std::vector<double> lin(m);
  for (int i = 0; i < m; ++i) lin[static_cast<std::size_t>(i)] = 0.5 + 2.0 * i;
  const auto y = linalg::spmv(pois, lin);
  for (int i = 1; i < m - 1; ++i) CHECK(y[static_cast<std::size_t>(i)] == 0.0);

  // random 5x5 against the dense product
  auto gen = oracles::rng();
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ti.clear(); tj.clear(); tv.clear();
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if ((i + j) % 2 == 0) {
        ti.push_back(i); tj.push_back(j); tv.push_back(dist(gen));
      }
    }
  }
  const CsrMatrix a = CsrMatrix::from_triplets(5, 5, ti, tj, tv);
  std::vector<double> x5(5);
  for (auto& v : x5) v = dist(gen);
  const auto y1 = linalg::spmv(a, x5);
  const auto yd = oracles::dense_apply(oracles::dense_from_csr(a), x5);
  for (int i = 0; i < 5; ++i) {
    CHECK(std::fabs(y1[static_cast<std::size_t>(i)] - yd[static_cast<std::size_t>(i)]) < 1e-14);
  }
  // determinism: bitwise identical repeat
  CHECK(linalg::spmv(a, x5) == y1);
}

TEST_CASE("from_triplets sums duplicates and sorts columns") {
  const CsrMatrix a = CsrMatrix::from_triplets(2, 2, {0, 0, 0}, {1, 0, 1}, {2.0, 1.0, 3.0});
  CHECK(a.at(0, 0) == 1.0);
  CHECK(a.at(0, 1) == 5.0);
  CHECK(a.nnz() == 2);
  for (int r = 0; r < a.rows; ++r) {
    for (auto p = a.row_ptr[static_cast<std::size_t>(r)] + 1;
         p < a.row_ptr[static_cast<std::size_t>(r) + 1]; ++p) {
      CHECK(a.col_idx[static_cast<std::size_t>(p - 1)] < a.col_idx[static_cast<std::size_t>(p)]);
    }
  }
}

TEST_CASE("thomas solve") {
  Tridiagonal eye{{0.0, 0.0}, {1.0, 1.0, 1.0}, {0.0, 0.0}};
  std::vector<double> rhs = {3.0, -1.0, 2.0};
  CHECK(linalg::thomas_solve(eye, rhs) == rhs);

  // discrete 1D Laplacian reproduces a quadratic exactly
  const int m = 33;
  const double hgrid = 1.0 / (m + 1);
  Tridiagonal lap;
  lap.sub.assign(m - 1, 1.0);
  lap.super.assign(m - 1, 1.0);
  lap.diag.assign(m, -2.0);
  auto exact = [&](int i) {
    const double x = (i + 1) * hgrid;
    return x * (1.0 - x);
  };
  std::vector<double> rhs2(m);
  for (int i = 0; i < m; ++i) rhs2[static_cast<std::size_t>(i)] = -2.0 * hgrid * hgrid;
  rhs2[0] -= exact(-1);
  rhs2[static_cast<std::size_t>(m - 1)] -= exact(m);
  const auto sol = linalg::thomas_solve(lap, rhs2);
  for (int i = 0; i < m; ++i) {
    CHECK(std::fabs(sol[static_cast<std::size_t>(i)] - exact(i)) < 1e-12);
  }

  // m = 4 against dense elimination
  Tridiagonal t4{{1.0, -0.5, 2.0}, {4.0, 5.0, 6.0, 7.0}, {0.5, 1.5, -1.0}};
  std::vector<double> b4 = {1.0, 2.0, 3.0, 4.0};
  const auto x4 = linalg::thomas_solve(t4, b4);
  std::vector<std::vector<double>> d4 = {{4.0, 0.5, 0.0, 0.0},
                                         {1.0, 5.0, 1.5, 0.0},
                                         {0.0, -0.5, 6.0, -1.0},
                                         {0.0, 0.0, 2.0, 7.0}};
  const auto xd = oracles::dense_solve(d4, b4);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::fabs(x4[static_cast<std::size_t>(i)] - xd[static_cast<std::size_t>(i)]) < 1e-13);
  }

  Tridiagonal sing{{1.0}, {0.0, 1.0}, {1.0}};
  CHECK_THROWS_AS(linalg::thomas_solve(sing, std::vector<double>{1.0, 1.0}),
                  std::runtime_error);
}

TEST_CASE("pcg on identity converges immediately") {
  const CsrMatrix eye = identity(10);
  std::vector<double> b(10, 2.5);
  const auto res = linalg::pcg_solve(eye, b);
  CHECK(res.report.converged);
  CHECK(res.report.iterations <= 1);
  for (double v : res.x) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("pcg matches dense solve on a 32x32 Laplacian") {
  const int m = 32;
  const CsrMatrix a = laplacian2d(m);
  std::vector<double> b(static_cast<std::size_t>(m * m), 1.0);
  SolverOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 5000;
  opts.check_symmetry = true;
  const auto res = linalg::pcg_solve(a, b, opts);
  CHECK(res.report.converged);

  const auto xd = oracles::dense_solve(oracles::dense_from_csr(a), b);
  double max_err = 0.0, max_ref = 0.0;
  for (std::size_t i = 0; i < xd.size(); ++i) {
    max_err = std::max(max_err, std::fabs(res.x[i] - xd[i]));
    max_ref = std::max(max_ref, std::fabs(xd[i]));
  }
  CHECK(max_err / max_ref < 1e-8);

  // jacobi agrees and does not take more iterations than unpreconditioned
  SolverOptions none = opts;
  none.precond = Preconditioner::none;
  SolverOptions jac = opts;
  jac.precond = Preconditioner::jacobi;
  const auto r_none = linalg::pcg_solve(a, b, none);
  const auto r_jac = linalg::pcg_solve(a, b, jac);
  CHECK(r_jac.report.iterations <= r_none.report.iterations);
  for (std::size_t i = 0; i < xd.size(); ++i) {
    CHECK(std::fabs(r_none.x[i] - r_jac.x[i]) < 1e-8 * max_ref);
  }

  // ssor cuts the iteration count further on this problem
  SolverOptions ssor = opts;
  ssor.precond = Preconditioner::ssor;
  const auto r_ssor = linalg::pcg_solve(a, b, ssor);
  CHECK(r_ssor.report.converged);
  CHECK(r_ssor.report.iterations < r_none.report.iterations);
}

TEST_CASE("pcg reported residual matches an independent recomputation") {
  const CsrMatrix a = laplacian2d(12);
  std::vector<double> b(144);
  auto gen = oracles::rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& v : b) v = dist(gen);
  const auto res = linalg::pcg_solve(a, b);
  const auto ax = oracles::dense_apply(oracles::dense_from_csr(a), res.x);
  double rn = 0.0, bn = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    rn += (b[i] - ax[i]) * (b[i] - ax[i]);
    bn += b[i] * b[i];
  }
  CHECK(std::fabs(std::sqrt(rn / bn) - res.report.rel_residual) < 1e-13);
}

TEST_CASE("pcg error is monotone in the A-norm") {
  const int m = 8;
  const CsrMatrix a = laplacian2d(m);
  std::vector<double> b(static_cast<std::size_t>(m * m));
  auto gen = oracles::rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& v : b) v = dist(gen);
  const auto exact = oracles::dense_solve(oracles::dense_from_csr(a), b);
  const auto dense = oracles::dense_from_csr(a);

  double prev = 1e300;
  for (int k = 1; k <= 40; ++k) {
    SolverOptions opts;
    opts.max_iter = k;
    opts.tol = 1e-30;
    opts.precond = Preconditioner::none;
    const auto res = linalg::pcg_solve(a, b, opts);
    std::vector<double> e(exact.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = res.x[i] - exact[i];
    const auto ae = oracles::dense_apply(dense, e);
    double anorm = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) anorm += e[i] * ae[i];
    if (prev < 1e-24) break;  // at the roundoff floor
    CHECK(anorm <= prev * (1.0 + 1e-10) + 1e-26);
    prev = anorm;
  }
}

TEST_CASE("pcg rejects asymmetric input when validation is requested") {
  const CsrMatrix bad =
      CsrMatrix::from_triplets(2, 2, {0, 0, 1, 1}, {0, 1, 0, 1}, {2.0, 1.0, -1.0, 2.0});
  SolverOptions opts;
  opts.check_symmetry = true;
  std::vector<double> b = {1.0, 1.0};
  CHECK_THROWS_AS(linalg::pcg_solve(bad, b, opts), std::invalid_argument);
}

TEST_CASE("pcg reports non-convergence as data") {
  const CsrMatrix a = laplacian2d(16);
  std::vector<double> b(256, 1.0);
  SolverOptions opts;
  opts.max_iter = 3;
  opts.precond = Preconditioner::none;
  const auto res = linalg::pcg_solve(a, b, opts);
  CHECK_FALSE(res.report.converged);
  CHECK(res.report.iterations == 3);
}

TEST_CASE("bicgstab on identity and advection-diffusion") {
  const CsrMatrix eye = identity(6);
  std::vector<double> b(6, -1.0);
  const auto r0 = linalg::bicgstab_solve(eye, b);
  CHECK(r0.report.converged);
  CHECK(r0.report.iterations <= 1);

  // upwinded 1D advection-diffusion, 64 cells
  const int m = 64;
  const double h = 1.0 / (m + 1);
  const double pe = 10.0;  // advection strength
  std::vector<int> ti, tj;
  std::vector<double> tv;
  for (int i = 0; i < m; ++i) {
    const double diff = 1.0 / (h * h);
    const double adv = pe / h;
    ti.push_back(i); tj.push_back(i); tv.push_back(2.0 * diff + adv);
    if (i > 0) { ti.push_back(i); tj.push_back(i - 1); tv.push_back(-diff - adv); }
    if (i < m - 1) { ti.push_back(i); tj.push_back(i + 1); tv.push_back(-diff); }
  }
  const CsrMatrix adv = CsrMatrix::from_triplets(m, m, ti, tj, tv);
  std::vector<double> rhs(m, 1.0);
  SolverOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 2000;
  const auto res = linalg::bicgstab_solve(adv, rhs, opts);
  CHECK(res.report.converged);
  const auto xd = oracles::dense_solve(oracles::dense_from_csr(adv), rhs);
  double scale = 0.0;
  for (double v : xd) scale = std::max(scale, std::fabs(v));
  for (int i = 0; i < m; ++i) {
    CHECK(std::fabs(res.x[static_cast<std::size_t>(i)] - xd[static_cast<std::size_t>(i)]) <
          1e-8 * scale);
  }
}

TEST_CASE("bicgstab agrees with pcg on symmetric input") {
  const CsrMatrix a = laplacian2d(16);
  std::vector<double> b(256);
  auto gen = oracles::rng(3);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (auto& v : b) v = dist(gen);
  SolverOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 4000;
  const auto rp = linalg::pcg_solve(a, b, opts);
  const auto rb = linalg::bicgstab_solve(a, b, opts);
  CHECK(rp.report.converged);
  CHECK(rb.report.converged);
  double scale = 0.0;
  for (double v : rp.x) scale = std::max(scale, std::fabs(v));
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(std::fabs(rp.x[i] - rb.x[i]) < 1e-8 * scale);
  }
}

TEST_CASE("is_symmetric") {
  CHECK(linalg::is_symmetric(laplacian2d(5), 1e-12));
  const CsrMatrix bad =
      CsrMatrix::from_triplets(2, 2, {0, 1}, {1, 0}, {1.0, 1.0 + 1e-6});
  CHECK_FALSE(linalg::is_symmetric(bad, 1e-12));
}

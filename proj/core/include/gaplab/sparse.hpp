#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gaplab::linalg {

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row; duplicate triplets are summed at build time.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> row_ptr;  // size rows + 1
  std::vector<int> col_idx;
  std::vector<double> vals;

  static CsrMatrix from_triplets(int rows, int cols,
                                 std::vector<int> ti, std::vector<int> tj,
                                 std::vector<double> tv);

  std::int64_t nnz() const { return static_cast<std::int64_t>(vals.size()); }
  double at(int i, int j) const;  // 0 if not stored
};

/// y = A x, accumulated strictly in stored order so repeated calls are
/// bitwise identical.
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x);

bool is_symmetric(const CsrMatrix& a, double tol);

// Fixed-order vector kernels shared by the solvers.
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);  // y += alpha x

/// Tridiagonal system with sub/main/super diagonals of length m-1, m, m-1.
struct Tridiagonal {
  std::vector<double> sub;
  std::vector<double> diag;
  std::vector<double> super;

  int size() const { return static_cast<int>(diag.size()); }
  std::vector<double> apply(std::span<const double> x) const;
};

/// Direct solve by the Thomas algorithm (no pivoting). Throws on a zero
/// pivot; intended for diagonally dominant systems.
std::vector<double> thomas_solve(const Tridiagonal& t, std::span<const double> rhs);

}  // namespace gaplab::linalg

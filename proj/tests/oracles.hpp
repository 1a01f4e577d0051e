#pragma once

// Independent reference implementations used only by tests: dense linear
// algebra oracles and an extended-precision root refinement. These must not
// share code paths with the library under test.

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "gaplab/sparse.hpp"

namespace oracles {

/// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    if (a[piv][col] == 0.0) throw std::runtime_error("dense_solve: singular");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double m = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
      b[r] -= m * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

inline std::vector<std::vector<double>> dense_from_csr(const gaplab::linalg::CsrMatrix& m) {
  std::vector<std::vector<double>> d(static_cast<std::size_t>(m.rows),
                                     std::vector<double>(static_cast<std::size_t>(m.cols), 0.0));
  for (int i = 0; i < m.rows; ++i) {
    for (auto p = m.row_ptr[static_cast<std::size_t>(i)];
         p < m.row_ptr[static_cast<std::size_t>(i) + 1]; ++p) {
      d[static_cast<std::size_t>(i)][static_cast<std::size_t>(m.col_idx[static_cast<std::size_t>(p)])] =
          m.vals[static_cast<std::size_t>(p)];
    }
  }
  return d;
}

inline std::vector<double> dense_apply(const std::vector<std::vector<double>>& a,
                                       const std::vector<double>& x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  }
  return y;
}

/// Positive root of x^2 + (n-1)x - (n-2) = 0 by Newton iteration in long
/// double, seeded away from the root.
inline long double alpha_newton_ld(int n) {
  const long double m = n - 1.0L;
  const long double c = n - 2.0L;
  long double x = 0.5L;
  for (int it = 0; it < 80; ++it) {
    const long double fx = x * x + m * x - c;
    const long double dfx = 2.0L * x + m;
    x -= fx / dfx;
  }
  return x;
}

inline std::mt19937_64 rng(std::uint64_t seed = 0x5eed1234u) {
  return std::mt19937_64(seed);
}

}  // namespace oracles

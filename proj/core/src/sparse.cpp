#include "gaplab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gaplab::linalg {

CsrMatrix CsrMatrix::from_triplets(int rows, int cols,
                                   std::vector<int> ti, std::vector<int> tj,
                                   std::vector<double> tv) {
  if (ti.size() != tj.size() || ti.size() != tv.size()) {
    throw std::invalid_argument("from_triplets: array lengths differ");
  }
  const std::size_t m = ti.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ti[a] != ti[b]) return ti[a] < ti[b];
    return tj[a] < tj[b];
  });

  CsrMatrix a;
  a.rows = rows;
  a.cols = cols;
  a.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
  a.col_idx.reserve(m);
  a.vals.reserve(m);

  int prev_i = -1;
  int prev_j = -1;
  for (std::size_t s = 0; s < m; ++s) {
    const std::size_t t = order[s];
    const int i = ti[t];
    const int j = tj[t];
    if (i < 0 || i >= rows || j < 0 || j >= cols) {
      throw std::out_of_range("from_triplets: index out of range");
    }
    if (i == prev_i && j == prev_j) {
      a.vals.back() += tv[t];
    } else {
      a.col_idx.push_back(j);
      a.vals.push_back(tv[t]);
      a.row_ptr[static_cast<std::size_t>(i) + 1]++;
      prev_i = i;
      prev_j = j;
    }
  }
  for (int i = 0; i < rows; ++i) {
    a.row_ptr[static_cast<std::size_t>(i) + 1] += a.row_ptr[static_cast<std::size_t>(i)];
  }
  return a;
}

double CsrMatrix::at(int i, int j) const {
  for (std::int64_t p = row_ptr[static_cast<std::size_t>(i)];
       p < row_ptr[static_cast<std::size_t>(i) + 1]; ++p) {
    if (col_idx[static_cast<std::size_t>(p)] == j) return vals[static_cast<std::size_t>(p)];
  }
  return 0.0;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (static_cast<int>(x.size()) != a.cols || static_cast<int>(y.size()) != a.rows) {
    throw std::invalid_argument("spmv: dimension mismatch");
  }
  for (int i = 0; i < a.rows; ++i) {
    double acc = 0.0;
    for (std::int64_t p = a.row_ptr[static_cast<std::size_t>(i)];
         p < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++p) {
      acc += a.vals[static_cast<std::size_t>(p)] *
             x[static_cast<std::size_t>(a.col_idx[static_cast<std::size_t>(p)])];
    }
    y[static_cast<std::size_t>(i)] = acc;
  }
}

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(static_cast<std::size_t>(a.rows));
  spmv(a, x, y);
  return y;
}

bool is_symmetric(const CsrMatrix& a, double tol) {
  if (a.rows != a.cols) return false;
  double scale = 0.0;
  for (double v : a.vals) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) return true;
  for (int i = 0; i < a.rows; ++i) {
    for (std::int64_t p = a.row_ptr[static_cast<std::size_t>(i)];
         p < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++p) {
      const int j = a.col_idx[static_cast<std::size_t>(p)];
      if (j <= i) continue;
      const double vij = a.vals[static_cast<std::size_t>(p)];
      const double vji = a.at(j, i);
      if (std::fabs(vij - vji) > tol * scale) return false;
    }
  }
  return true;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

std::vector<double> Tridiagonal::apply(std::span<const double> x) const {
  const int m = size();
  if (static_cast<int>(x.size()) != m) {
    throw std::invalid_argument("Tridiagonal::apply: dimension mismatch");
  }
  std::vector<double> y(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double acc = diag[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    if (i > 0) acc += sub[static_cast<std::size_t>(i - 1)] * x[static_cast<std::size_t>(i - 1)];
    if (i < m - 1) acc += super[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i + 1)];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

std::vector<double> thomas_solve(const Tridiagonal& t, std::span<const double> rhs) {
  const int m = t.size();
  if (static_cast<int>(t.sub.size()) != m - 1 || static_cast<int>(t.super.size()) != m - 1) {
    throw std::invalid_argument("thomas_solve: inconsistent diagonal lengths");
  }
  if (static_cast<int>(rhs.size()) != m) {
    throw std::invalid_argument("thomas_solve: rhs length mismatch");
  }
  std::vector<double> c(static_cast<std::size_t>(m));
  std::vector<double> d(static_cast<std::size_t>(m));
  double piv = t.diag[0];
  if (piv == 0.0) throw std::runtime_error("thomas_solve: zero pivot at row 0");
  c[0] = (m > 1) ? t.super[0] / piv : 0.0;
  d[0] = rhs[0] / piv;
  for (int i = 1; i < m; ++i) {
    const std::size_t u = static_cast<std::size_t>(i);
    piv = t.diag[u] - t.sub[u - 1] * c[u - 1];
    if (piv == 0.0) {
      throw std::runtime_error("thomas_solve: zero pivot at row " + std::to_string(i));
    }
    c[u] = (i < m - 1) ? t.super[u] / piv : 0.0;
    d[u] = (rhs[u] - t.sub[u - 1] * d[u - 1]) / piv;
  }
  for (int i = m - 2; i >= 0; --i) {
    const std::size_t u = static_cast<std::size_t>(i);
    d[u] -= c[u] * d[u + 1];
  }
  return d;
}

}  // namespace gaplab::linalg

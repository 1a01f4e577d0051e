#include "gaplab/krylov.hpp"

#include <cmath>
#include <stdexcept>

namespace gaplab::linalg {

const char* preconditioner_name(Preconditioner p) {
  switch (p) {
    case Preconditioner::none: return "none";
    case Preconditioner::jacobi: return "jacobi";
    case Preconditioner::ssor: return "ssor";
  }
  return "unknown";
}

namespace {

std::vector<double> extract_diagonal(const CsrMatrix& a) {
  std::vector<double> d(static_cast<std::size_t>(a.rows), 0.0);
  for (int i = 0; i < a.rows; ++i) {
    for (std::int64_t p = a.row_ptr[static_cast<std::size_t>(i)];
         p < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++p) {
      if (a.col_idx[static_cast<std::size_t>(p)] == i) {
        d[static_cast<std::size_t>(i)] = a.vals[static_cast<std::size_t>(p)];
      }
    }
  }
  for (int i = 0; i < a.rows; ++i) {
    if (d[static_cast<std::size_t>(i)] == 0.0) {
      throw std::runtime_error("preconditioner: zero diagonal entry");
    }
  }
  return d;
}

class PrecondApplier {
 public:
  PrecondApplier(const CsrMatrix& a, const SolverOptions& opts)
      : a_(a), kind_(opts.precond), omega_(opts.ssor_omega) {
    if (kind_ != Preconditioner::none) diag_ = extract_diagonal(a);
  }

  // z = M^{-1} r
  void apply(std::span<const double> r, std::span<double> z) const {
    const std::size_t n = static_cast<std::size_t>(a_.rows);
    switch (kind_) {
      case Preconditioner::none:
        for (std::size_t i = 0; i < n; ++i) z[i] = r[i];
        return;
      case Preconditioner::jacobi:
        for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag_[i];
        return;
      case Preconditioner::ssor:
        apply_ssor(r, z);
        return;
    }
  }

 private:
  // M = (D + wL) D^{-1} (D + wU) / (w(2-w)), SPD for 0 < w < 2.
  void apply_ssor(std::span<const double> r, std::span<double> z) const {
    const int n = a_.rows;
    // forward: (D + wL) t = r
    for (int i = 0; i < n; ++i) {
      const std::size_t u = static_cast<std::size_t>(i);
      double acc = r[u];
      for (std::int64_t p = a_.row_ptr[u]; p < a_.row_ptr[u + 1]; ++p) {
        const int j = a_.col_idx[static_cast<std::size_t>(p)];
        if (j < i) acc -= omega_ * a_.vals[static_cast<std::size_t>(p)] * z[static_cast<std::size_t>(j)];
      }
      z[u] = acc / diag_[u];
    }
    for (int i = 0; i < n; ++i) {
      const std::size_t u = static_cast<std::size_t>(i);
      z[u] *= diag_[u];
    }
    // backward: (D + wU) z = t
    for (int i = n - 1; i >= 0; --i) {
      const std::size_t u = static_cast<std::size_t>(i);
      double acc = z[u];
      for (std::int64_t p = a_.row_ptr[u]; p < a_.row_ptr[u + 1]; ++p) {
        const int j = a_.col_idx[static_cast<std::size_t>(p)];
        if (j > i) acc -= omega_ * a_.vals[static_cast<std::size_t>(p)] * z[static_cast<std::size_t>(j)];
      }
      z[u] = acc / diag_[u];
    }
    const double scale = omega_ * (2.0 - omega_);
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] *= scale;
  }

  const CsrMatrix& a_;
  Preconditioner kind_;
  double omega_;
  std::vector<double> diag_;
};

SolveReport finish_report(const CsrMatrix& a, std::span<const double> rhs,
                          std::span<const double> x, const char* solver,
                          const SolverOptions& opts, int iters) {
  std::vector<double> r(rhs.begin(), rhs.end());
  std::vector<double> ax = spmv(a, x);
  axpy(-1.0, ax, r);
  const double nb = norm2(rhs);
  SolveReport rep;
  rep.solver = solver;
  rep.preconditioner = preconditioner_name(opts.precond);
  rep.iterations = iters;
  rep.rel_residual = (nb > 0.0) ? norm2(r) / nb : norm2(r);
  rep.converged = rep.rel_residual <= opts.tol;
  return rep;
}

}  // namespace

SolveResult pcg_solve(const CsrMatrix& a, std::span<const double> rhs,
                      const SolverOptions& opts) {
  if (a.rows != a.cols) throw std::invalid_argument("pcg_solve: matrix not square");
  if (static_cast<int>(rhs.size()) != a.rows) {
    throw std::invalid_argument("pcg_solve: rhs size mismatch");
  }
  if (opts.check_symmetry && !is_symmetric(a, 1e-12)) {
    throw std::invalid_argument("pcg_solve: matrix is not symmetric within 1e-12");
  }
  const std::size_t n = static_cast<std::size_t>(a.rows);
  SolveResult result;
  result.x.assign(n, 0.0);
  if (!opts.initial_guess.empty()) {
    if (opts.initial_guess.size() != n) {
      throw std::invalid_argument("pcg_solve: initial guess size mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) result.x[i] = opts.initial_guess[i];
  }

  const double nb = norm2(rhs);
  if (nb == 0.0) {
    result.x.assign(n, 0.0);
    result.report = finish_report(a, rhs, result.x, "pcg", opts, 0);
    return result;
  }

  PrecondApplier precond(a, opts);
  std::vector<double> r(n), z(n), p(n), ap(n);
  spmv(a, result.x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  precond.apply(r, z);
  p = z;
  double rz = dot(r, z);

  int it = 0;
  while (it < opts.max_iter && norm2(r) > opts.tol * nb) {
    spmv(a, p, ap);
    const double pap = dot(p, ap);
    if (pap <= 0.0) break;  // loss of positive definiteness; report as-is
    const double alpha = rz / pap;
    axpy(alpha, p, result.x);
    axpy(-alpha, ap, r);
    precond.apply(r, z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ++it;
  }
  result.report = finish_report(a, rhs, result.x, "pcg", opts, it);
  return result;
}

SolveResult bicgstab_solve(const CsrMatrix& a, std::span<const double> rhs,
                           const SolverOptions& opts) {
  if (a.rows != a.cols) throw std::invalid_argument("bicgstab_solve: matrix not square");
  if (static_cast<int>(rhs.size()) != a.rows) {
    throw std::invalid_argument("bicgstab_solve: rhs size mismatch");
  }
  const std::size_t n = static_cast<std::size_t>(a.rows);
  SolveResult result;
  result.x.assign(n, 0.0);
  if (!opts.initial_guess.empty()) {
    if (opts.initial_guess.size() != n) {
      throw std::invalid_argument("bicgstab_solve: initial guess size mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) result.x[i] = opts.initial_guess[i];
  }

  const double nb = norm2(rhs);
  if (nb == 0.0) {
    result.x.assign(n, 0.0);
    result.report = finish_report(a, rhs, result.x, "bicgstab", opts, 0);
    return result;
  }

  PrecondApplier precond(a, opts);
  std::vector<double> r(n), rhat(n), p(n, 0.0), v(n, 0.0), phat(n), s(n), shat(n), t(n);
  spmv(a, result.x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  rhat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;

  // near-breakdown threshold relative to the shadow residual pairing
  const double breakdown = 1e-30;
  double last_restart_norm = norm2(r);
  int it = 0;
  while (it < opts.max_iter && norm2(r) > opts.tol * nb) {
    const double rho_next = dot(rhat, r);
    bool need_restart = std::fabs(rho_next) < breakdown * nb * nb || omega == 0.0;
    if (!need_restart) {
      const double beta = (rho_next / rho) * (alpha / omega);
      rho = rho_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      precond.apply(p, phat);
      spmv(a, phat, v);
      const double rhat_v = dot(rhat, v);
      if (rhat_v == 0.0) {
        need_restart = true;
      } else {
        alpha = rho / rhat_v;
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        ++it;
        if (norm2(s) <= opts.tol * nb) {
          axpy(alpha, phat, result.x);
          r = s;
          break;
        }
        precond.apply(s, shat);
        spmv(a, shat, t);
        const double tt = dot(t, t);
        if (tt == 0.0) {
          axpy(alpha, phat, result.x);
          for (std::size_t i = 0; i < n; ++i) r[i] = s[i];
          need_restart = true;
        } else {
          omega = dot(t, s) / tt;
          for (std::size_t i = 0; i < n; ++i) result.x[i] += alpha * phat[i] + omega * shat[i];
          for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
        }
      }
    }
    if (need_restart) {
      // restart from the current iterate; give up only when the last
      // restart cycle made no progress
      spmv(a, result.x, r);
      for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
      const double rn = norm2(r);
      if (rn >= last_restart_norm * (1.0 - 1e-12)) break;
      last_restart_norm = rn;
      rhat = r;
      rho = alpha = omega = 1.0;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      ++it;
    }
  }
  result.report = finish_report(a, rhs, result.x, "bicgstab", opts, it);
  return result;
}

}  // namespace gaplab::linalg

#pragma once

#include <span>
#include <string>
#include <vector>

#include "gaplab/sparse.hpp"

namespace gaplab::linalg {

enum class Preconditioner { none, jacobi, ssor };

struct SolverOptions {
  double tol = 1e-10;          // relative residual target |b - Ax| / |b|
  int max_iter = 10000;
  Preconditioner precond = Preconditioner::jacobi;
  double ssor_omega = 1.5;
  std::span<const double> initial_guess = {};  // empty -> zero start
  bool check_symmetry = false;                 // pcg only, validated on demand
};

/// Convergence is data, not an exception: sweeps record partial failures.
struct SolveReport {
  std::string solver;
  std::string preconditioner;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

struct SolveResult {
  std::vector<double> x;
  SolveReport report;
};

/// Preconditioned conjugate gradient for symmetric positive definite
/// systems. Deterministic iterate sequence: all reductions run in fixed
/// serial order. The reported residual is recomputed from b - Ax.
SolveResult pcg_solve(const CsrMatrix& a, std::span<const double> rhs,
                      const SolverOptions& opts = {});

/// BiCGStab for mildly nonsymmetric systems (cross-derivative assembly).
SolveResult bicgstab_solve(const CsrMatrix& a, std::span<const double> rhs,
                           const SolverOptions& opts = {});

const char* preconditioner_name(Preconditioner p);

}  // namespace gaplab::linalg

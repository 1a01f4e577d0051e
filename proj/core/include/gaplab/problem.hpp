#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "gaplab/grid.hpp"
#include "gaplab/krylov.hpp"

namespace gaplab::pde {

/// Boundary data is sampled at boundary face midpoints. Dirichlet data is
/// the trace value; Neumann data is the outward conormal derivative of the
/// solution (per unit physical arc, the degenerate weight is applied by the
/// assembly). Nonzero Neumann data is only supported on grids without
/// cross coefficients; the insulating condition on gap grids is the
/// zero-flux natural condition.
struct BoundaryCondition {
  enum class Kind { dirichlet, neumann, natural_degenerate };
  Kind kind = Kind::neumann;
  std::function<double(double xi, double eta, double r, double xn)> data;  // null -> 0

  static BoundaryCondition dirichlet(std::function<double(double, double, double, double)> f) {
    return {Kind::dirichlet, std::move(f)};
  }
  static BoundaryCondition dirichlet_zero() { return {Kind::dirichlet, nullptr}; }
  static BoundaryCondition neumann(std::function<double(double, double, double, double)> f) {
    return {Kind::neumann, std::move(f)};
  }
  static BoundaryCondition insulating() { return {Kind::neumann, nullptr}; }
  static BoundaryCondition natural_degenerate() { return {Kind::natural_degenerate, nullptr}; }
};

struct BoundarySpec {
  BoundaryCondition left, right, bottom, top;  // xi = lo/hi, eta = lo/hi
};

/// Discrete problem for  div(A grad u) - q u = div F + G  in logical flux
/// form on a curvilinear grid. F is sampled at face midpoints, G at cell
/// centers, both per unit logical measure.
struct DiscreteProblem {
  std::shared_ptr<const geom::CurvilinearGrid> grid;
  geom::CoefficientField coeffs;
  BoundarySpec bcs;
  std::function<double(double xi, double eta)> rhs_g;   // null -> 0
  std::function<double(double xi, double eta)> rhs_fx;  // x-component of F
  std::function<double(double xi, double eta)> rhs_fy;  // y-component of F
};

struct AssembledSystem {
  linalg::CsrMatrix matrix;
  std::vector<double> rhs;
};

/// Conservative finite-volume assembly: 5-point stencil for diagonal
/// coefficients, widened by the symmetric cross stencil when A12 != 0.
/// Dirichlet data is eliminated into the rhs. Throws on an indefinite
/// coefficient sample, naming the face.
AssembledSystem assemble(const DiscreteProblem& problem);

struct FieldSolution {
  std::shared_ptr<const geom::CurvilinearGrid> grid;
  int n = 3;
  int k = 1;
  std::vector<double> u;
  std::vector<double> ur, un, amplitude;  // filled by reconstruct_gradient
  // exact trace values on the xi edges when known (Dirichlet data); the
  // gradient reconstruction anchors its one-sided stencils on them
  std::optional<double> left_edge_value;
  std::optional<double> right_edge_value;
  linalg::SolveReport report;
};

}  // namespace gaplab::pde

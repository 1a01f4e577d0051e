#pragma once

#include <iosfwd>
#include <vector>

#include "gaplab/maps.hpp"
#include "gaplab/rates.hpp"

namespace gaplab::geom {

/// Node grading for one logical direction. Geometric grading shrinks cells
/// toward the flagged ends with the given adjacent-cell ratio, capped so no
/// cell is more than `strength` times smaller than the largest one.
struct GradingSpec {
  enum class Kind { uniform, geometric };
  Kind kind = Kind::geometric;
  double ratio = 1.05;
  double strength = 32.0;

  static GradingSpec uniform() { return {Kind::uniform, 1.0, 1.0}; }
};

std::vector<double> graded_nodes(double lo, double hi, int n_cells,
                                 const GradingSpec& spec, bool cluster_lo,
                                 bool cluster_hi);

enum class GridKind { cartesian, bipolar, gap };

/// Logically rectangular cell-centered grid with the metric data needed by
/// the finite-volume assembly: face radii (the degenerate weight is
/// r^(n-2), applied at assembly time), physical face lengths, meridian cell
/// areas, and the per-cell transform taking logical gradients to physical
/// (u_r, u_n) components.
struct CurvilinearGrid {
  GridKind kind = GridKind::cartesian;
  int nx = 0;
  int ny = 0;
  double eps = 0.0;

  std::vector<double> xnodes, ynodes;  // logical nodes, sizes nx+1 / ny+1
  std::vector<double> xc, yc;          // logical cell centers

  // per cell (size nx*ny)
  std::vector<double> cell_r, cell_xn, cell_vol, cell_h2;
  std::vector<double> gxf_rr, gxf_rn, gxf_nr, gxf_nn;  // (u_r,u_n) = G (u_xi,u_eta)

  // x-face midpoints, size (nx+1)*ny
  std::vector<double> fx_r, fx_xn, fx_len;
  // y-face midpoints, size nx*(ny+1)
  std::vector<double> fy_r, fy_xn, fy_len;

  // eta-fastest ordering: forward/backward sweeps then act like line
  // relaxation along the strongly coupled direction of thin-gap grids
  int cell_index(int i, int j) const { return i * ny + j; }
  int xface_index(int i, int j) const { return j * (nx + 1) + i; }
  int yface_index(int i, int j) const { return j * nx + i; }
  int cells() const { return nx * ny; }
  double dx(int i) const { return xnodes[static_cast<std::size_t>(i) + 1] - xnodes[static_cast<std::size_t>(i)]; }
  double dy(int j) const { return ynodes[static_cast<std::size_t>(j) + 1] - ynodes[static_cast<std::size_t>(j)]; }
  double logical_area(int i, int j) const { return dx(i) * dy(j); }
};

CurvilinearGrid build_bipolar_grid(const BipolarMap& map, int n_sigma, int n_tau,
                                   const GradingSpec& sigma_grading);

CurvilinearGrid build_gap_grid(const GapMap& map, int n_rho, int n_yn,
                               const GradingSpec& rho_grading);

CurvilinearGrid make_cartesian_grid(double x0, double x1, double y0, double y1,
                                    int nx, int ny);

/// Face coefficients and the zeroth-order term in logical flux form: the
/// x-face flux is a11 du/dxi + a12 du/deta per unit logical eta, and the
/// cell mass contribution is cell_q times the logical cell area.
struct CoefficientField {
  int n = 3;
  int k = 1;
  double eps = 0.0;
  bool has_cross = false;
  std::vector<double> fx_a11, fx_a12;
  std::vector<double> fy_a22, fy_a12;
  std::vector<double> cell_q;

  double mu() const {
    return static_cast<double>(k) * static_cast<double>(k + n - 3);
  }
};

/// Weights r^(n-2) on faces and mass mu_k r^(n-4) h^2 on cells for the
/// conformal bipolar chart.
CoefficientField bipolar_coefficients(const CurvilinearGrid& grid,
                                      rates::Dimension n, int k);

/// Exact transformed gap coefficients with the measure weight rho^(n-2)
/// folded in; cross entries are nonzero away from the axis.
CoefficientField gap_coefficient_field(const CurvilinearGrid& grid,
                                       const GapMap& map, rates::Dimension n,
                                       int k);

/// Identity coefficients, zero mass (Cartesian test problems).
CoefficientField unit_coefficients(const CurvilinearGrid& grid);

/// integer power helper shared by the coefficient builders; exponent may be
/// negative (degenerate mass weights)
double ipow(double base, int exponent);

/// CSV node dump: i, j, xi, eta, r, xn, cell_volume
void dump_grid_csv(const CurvilinearGrid& grid, std::ostream& os);

}  // namespace gaplab::geom

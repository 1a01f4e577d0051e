#include "gaplab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace gaplab::geom {

std::vector<double> graded_nodes(double lo, double hi, int n_cells,
                                 const GradingSpec& spec, bool cluster_lo,
                                 bool cluster_hi) {
  if (n_cells < 1) throw std::invalid_argument("graded_nodes: need at least one cell");
  if (!(hi > lo)) throw std::invalid_argument("graded_nodes: empty interval");
  std::vector<double> rel(static_cast<std::size_t>(n_cells), 1.0);
  if (spec.kind == GradingSpec::Kind::geometric && spec.ratio > 1.0) {
    for (int i = 0; i < n_cells; ++i) {
      int layer = n_cells;  // effectively uncapped when no end is clustered
      if (cluster_lo && cluster_hi) {
        layer = std::min(i, n_cells - 1 - i);
      } else if (cluster_lo) {
        layer = i;
      } else if (cluster_hi) {
        layer = n_cells - 1 - i;
      }
      const double size = std::pow(spec.ratio, static_cast<double>(layer));
      rel[static_cast<std::size_t>(i)] = std::min(size, spec.strength);
    }
  }
  double total = 0.0;
  for (double v : rel) total += v;
  const double scale = (hi - lo) / total;
  std::vector<double> nodes(static_cast<std::size_t>(n_cells) + 1);
  nodes[0] = lo;
  double acc = lo;
  for (int i = 0; i < n_cells; ++i) {
    acc += rel[static_cast<std::size_t>(i)] * scale;
    nodes[static_cast<std::size_t>(i) + 1] = acc;
  }
  nodes[static_cast<std::size_t>(n_cells)] = hi;
  return nodes;
}

namespace {

void init_logical(CurvilinearGrid& g, std::vector<double> xn, std::vector<double> yn) {
  g.xnodes = std::move(xn);
  g.ynodes = std::move(yn);
  g.nx = static_cast<int>(g.xnodes.size()) - 1;
  g.ny = static_cast<int>(g.ynodes.size()) - 1;
  g.xc.resize(static_cast<std::size_t>(g.nx));
  g.yc.resize(static_cast<std::size_t>(g.ny));
  for (int i = 0; i < g.nx; ++i) {
    g.xc[static_cast<std::size_t>(i)] =
        0.5 * (g.xnodes[static_cast<std::size_t>(i)] + g.xnodes[static_cast<std::size_t>(i) + 1]);
  }
  for (int j = 0; j < g.ny; ++j) {
    g.yc[static_cast<std::size_t>(j)] =
        0.5 * (g.ynodes[static_cast<std::size_t>(j)] + g.ynodes[static_cast<std::size_t>(j) + 1]);
  }
  const std::size_t nc = static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny);
  g.cell_r.resize(nc);
  g.cell_xn.resize(nc);
  g.cell_vol.resize(nc);
  g.cell_h2.resize(nc);
  g.gxf_rr.resize(nc);
  g.gxf_rn.resize(nc);
  g.gxf_nr.resize(nc);
  g.gxf_nn.resize(nc);
  const std::size_t nfx = static_cast<std::size_t>(g.nx + 1) * static_cast<std::size_t>(g.ny);
  g.fx_r.resize(nfx);
  g.fx_xn.resize(nfx);
  g.fx_len.resize(nfx);
  const std::size_t nfy = static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny + 1);
  g.fy_r.resize(nfy);
  g.fy_xn.resize(nfy);
  g.fy_len.resize(nfy);
}

}  // namespace

CurvilinearGrid build_bipolar_grid(const BipolarMap& map, int n_sigma, int n_tau,
                                   const GradingSpec& sigma_grading) {
  if (n_sigma < 8 || n_tau < 8) {
    throw std::invalid_argument("build_bipolar_grid: grid sizes must be >= 8");
  }
  CurvilinearGrid g;
  g.kind = GridKind::bipolar;
  g.eps = map.eps;
  init_logical(g,
               graded_nodes(0.0, std::numbers::pi, n_sigma, sigma_grading, true, true),
               graded_nodes(-map.tau0, map.tau0, n_tau, GradingSpec::uniform(), false, false));

  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.cell_index(i, j);
      const auto d = map.derivatives(g.xc[static_cast<std::size_t>(i)], g.yc[static_cast<std::size_t>(j)]);
      const auto p = map.forward(g.xc[static_cast<std::size_t>(i)], g.yc[static_cast<std::size_t>(j)]);
      const double h2 = d.scale * d.scale;
      g.cell_r[static_cast<std::size_t>(c)] = p.r;
      g.cell_xn[static_cast<std::size_t>(c)] = p.xn;
      g.cell_h2[static_cast<std::size_t>(c)] = h2;
      g.cell_vol[static_cast<std::size_t>(c)] = h2 * g.logical_area(i, j);
      g.gxf_rr[static_cast<std::size_t>(c)] = d.r_s / h2;
      g.gxf_rn[static_cast<std::size_t>(c)] = d.r_t / h2;
      g.gxf_nr[static_cast<std::size_t>(c)] = d.xn_s / h2;
      g.gxf_nn[static_cast<std::size_t>(c)] = d.xn_t / h2;
      if (!(g.cell_vol[static_cast<std::size_t>(c)] > 0.0)) {
        throw std::runtime_error("build_bipolar_grid: nonpositive cell volume");
      }
    }
  }
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i <= g.nx; ++i) {
      const int fc = g.xface_index(i, j);
      const double s = g.xnodes[static_cast<std::size_t>(i)];
      const double t = g.yc[static_cast<std::size_t>(j)];
      const auto p = map.forward(s, t);
      // the edges sigma in {0, pi} are the symmetry axis: r vanishes along
      // the whole face, including the infinity point a midpoint may hit
      g.fx_r[static_cast<std::size_t>(fc)] = (i == 0 || i == g.nx) ? 0.0 : p.r;
      g.fx_xn[static_cast<std::size_t>(fc)] = p.xn;
      g.fx_len[static_cast<std::size_t>(fc)] = p.scale * g.dy(j);
    }
  }
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int fc = g.yface_index(i, j);
      const double s = g.xc[static_cast<std::size_t>(i)];
      const double t = g.ynodes[static_cast<std::size_t>(j)];
      const auto p = map.forward(s, t);
      g.fy_r[static_cast<std::size_t>(fc)] = p.r;
      g.fy_xn[static_cast<std::size_t>(fc)] = p.xn;
      g.fy_len[static_cast<std::size_t>(fc)] = p.scale * g.dx(i);
    }
  }
  return g;
}

CurvilinearGrid build_gap_grid(const GapMap& map, int n_rho, int n_yn,
                               const GradingSpec& rho_grading) {
  if (n_rho < 8 || n_yn < 8) {
    throw std::invalid_argument("build_gap_grid: grid sizes must be >= 8");
  }
  CurvilinearGrid g;
  g.kind = GridKind::gap;
  g.eps = map.eps;
  init_logical(g,
               graded_nodes(0.0, map.shape.patch_radius, n_rho, rho_grading, true, false),
               graded_nodes(-map.eps, map.eps, n_yn, GradingSpec::uniform(), false, false));

  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.cell_index(i, j);
      const double rho = g.xc[static_cast<std::size_t>(i)];
      const double yn = g.yc[static_cast<std::size_t>(j)];
      const double d = map.thickness(rho);
      g.cell_r[static_cast<std::size_t>(c)] = rho;
      g.cell_xn[static_cast<std::size_t>(c)] = map.xn_of(rho, yn);
      g.cell_h2[static_cast<std::size_t>(c)] = 1.0;
      g.cell_vol[static_cast<std::size_t>(c)] = d / (2.0 * map.eps) * g.logical_area(i, j);
      const double jr = map.jac_rho(rho, yn);
      const double jn = map.jac_n(rho);
      g.gxf_rr[static_cast<std::size_t>(c)] = 1.0;
      g.gxf_rn[static_cast<std::size_t>(c)] = jr;
      g.gxf_nr[static_cast<std::size_t>(c)] = 0.0;
      g.gxf_nn[static_cast<std::size_t>(c)] = jn;
      if (!(g.cell_vol[static_cast<std::size_t>(c)] > 0.0)) {
        throw std::runtime_error("build_gap_grid: nonpositive cell volume");
      }
    }
  }
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i <= g.nx; ++i) {
      const int fc = g.xface_index(i, j);
      const double rho = g.xnodes[static_cast<std::size_t>(i)];
      const double yn = g.yc[static_cast<std::size_t>(j)];
      g.fx_r[static_cast<std::size_t>(fc)] = rho;
      g.fx_xn[static_cast<std::size_t>(fc)] = map.xn_of(rho, yn);
      g.fx_len[static_cast<std::size_t>(fc)] = map.thickness(rho) / (2.0 * map.eps) * g.dy(j);
    }
  }
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int fc = g.yface_index(i, j);
      const double rho = g.xc[static_cast<std::size_t>(i)];
      const double yn = g.ynodes[static_cast<std::size_t>(j)];
      g.fy_r[static_cast<std::size_t>(fc)] = rho;
      g.fy_xn[static_cast<std::size_t>(fc)] = map.xn_of(rho, yn);
      const double slope = map.jac_rho(rho, yn) == 0.0
                               ? 0.0
                               : -map.jac_rho(rho, yn) / map.jac_n(rho);
      g.fy_len[static_cast<std::size_t>(fc)] = std::sqrt(1.0 + slope * slope) * g.dx(i);
    }
  }
  return g;
}

CurvilinearGrid make_cartesian_grid(double x0, double x1, double y0, double y1,
                                    int nx, int ny) {
  CurvilinearGrid g;
  g.kind = GridKind::cartesian;
  init_logical(g, graded_nodes(x0, x1, nx, GradingSpec::uniform(), false, false),
               graded_nodes(y0, y1, ny, GradingSpec::uniform(), false, false));
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int c = g.cell_index(i, j);
      g.cell_r[static_cast<std::size_t>(c)] = g.xc[static_cast<std::size_t>(i)];
      g.cell_xn[static_cast<std::size_t>(c)] = g.yc[static_cast<std::size_t>(j)];
      g.cell_h2[static_cast<std::size_t>(c)] = 1.0;
      g.cell_vol[static_cast<std::size_t>(c)] = g.logical_area(i, j);
      g.gxf_rr[static_cast<std::size_t>(c)] = 1.0;
      g.gxf_rn[static_cast<std::size_t>(c)] = 0.0;
      g.gxf_nr[static_cast<std::size_t>(c)] = 0.0;
      g.gxf_nn[static_cast<std::size_t>(c)] = 1.0;
    }
  }
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i <= g.nx; ++i) {
      const int fc = g.xface_index(i, j);
      g.fx_r[static_cast<std::size_t>(fc)] = g.xnodes[static_cast<std::size_t>(i)];
      g.fx_xn[static_cast<std::size_t>(fc)] = g.yc[static_cast<std::size_t>(j)];
      g.fx_len[static_cast<std::size_t>(fc)] = g.dy(j);
    }
  }
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int fc = g.yface_index(i, j);
      g.fy_r[static_cast<std::size_t>(fc)] = g.xc[static_cast<std::size_t>(i)];
      g.fy_xn[static_cast<std::size_t>(fc)] = g.ynodes[static_cast<std::size_t>(j)];
      g.fy_len[static_cast<std::size_t>(fc)] = g.dx(i);
    }
  }
  return g;
}

double ipow(double base, int exponent) {
  if (exponent < 0) return 1.0 / ipow(base, -exponent);
  double acc = 1.0;
  for (int i = 0; i < exponent; ++i) acc *= base;
  return acc;
}

CoefficientField bipolar_coefficients(const CurvilinearGrid& grid,
                                      rates::Dimension n, int k) {
  if (grid.kind != GridKind::bipolar) {
    throw std::invalid_argument("bipolar_coefficients: grid is not bipolar");
  }
  if (k < 0) throw std::domain_error("bipolar_coefficients: k must be >= 0");
  CoefficientField cf;
  cf.n = n.n;
  cf.k = k;
  cf.eps = grid.eps;
  cf.has_cross = false;
  cf.fx_a11.resize(grid.fx_r.size());
  cf.fy_a22.resize(grid.fy_r.size());
  cf.cell_q.resize(static_cast<std::size_t>(grid.cells()));
  for (std::size_t f = 0; f < grid.fx_r.size(); ++f) {
    cf.fx_a11[f] = ipow(grid.fx_r[f], n.n - 2);
  }
  for (std::size_t f = 0; f < grid.fy_r.size(); ++f) {
    cf.fy_a22[f] = ipow(grid.fy_r[f], n.n - 2);
  }
  const double mu = cf.mu();
  for (std::size_t c = 0; c < cf.cell_q.size(); ++c) {
    cf.cell_q[c] = mu * ipow(grid.cell_r[c], n.n - 4) * grid.cell_h2[c];
  }
  return cf;
}

CoefficientField gap_coefficient_field(const CurvilinearGrid& grid,
                                       const GapMap& map, rates::Dimension n,
                                       int k) {
  if (grid.kind != GridKind::gap) {
    throw std::invalid_argument("gap_coefficient_field: grid is not a gap grid");
  }
  if (k < 0) throw std::domain_error("gap_coefficient_field: k must be >= 0");
  CoefficientField cf;
  cf.n = n.n;
  cf.k = k;
  cf.eps = grid.eps;
  cf.has_cross = true;
  cf.fx_a11.resize(grid.fx_r.size());
  cf.fx_a12.resize(grid.fx_r.size());
  cf.fy_a22.resize(grid.fy_r.size());
  cf.fy_a12.resize(grid.fy_r.size());
  cf.cell_q.resize(static_cast<std::size_t>(grid.cells()));
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i <= grid.nx; ++i) {
      const std::size_t f = static_cast<std::size_t>(grid.xface_index(i, j));
      const double rho = grid.fx_r[f];
      const double yn = grid.yc[static_cast<std::size_t>(j)];
      const auto s = gap_coefficients_t<double>(map, rho, yn);
      const double w = ipow(rho, n.n - 2);
      cf.fx_a11[f] = w * s.a11;
      cf.fx_a12[f] = w * s.a12;
    }
  }
  for (int j = 0; j <= grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t f = static_cast<std::size_t>(grid.yface_index(i, j));
      const double rho = grid.fy_r[f];
      const double yn = grid.ynodes[static_cast<std::size_t>(j)];
      const auto s = gap_coefficients_t<double>(map, rho, yn);
      const double w = ipow(rho, n.n - 2);
      cf.fy_a22[f] = w * s.a22;
      cf.fy_a12[f] = w * s.a12;
    }
  }
  const double mu = cf.mu();
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t c = static_cast<std::size_t>(grid.cell_index(i, j));
      const double rho = grid.cell_r[c];
      cf.cell_q[c] = mu * ipow(rho, n.n - 4) * map.thickness(rho);
    }
  }
  return cf;
}

CoefficientField unit_coefficients(const CurvilinearGrid& grid) {
  CoefficientField cf;
  cf.n = 3;
  cf.k = 0;
  cf.eps = grid.eps;
  cf.has_cross = false;
  cf.fx_a11.assign(grid.fx_r.size(), 1.0);
  cf.fy_a22.assign(grid.fy_r.size(), 1.0);
  cf.cell_q.assign(static_cast<std::size_t>(grid.cells()), 0.0);
  return cf;
}

void dump_grid_csv(const CurvilinearGrid& grid, std::ostream& os) {
  os << "i,j,xi,eta,r,xn,cell_volume\n";
  char buf[256];
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t c = static_cast<std::size_t>(grid.cell_index(i, j));
      std::snprintf(buf, sizeof(buf), "%d,%d,%.12g,%.12g,%.12g,%.12g,%.12g\n", i, j,
                    grid.xc[static_cast<std::size_t>(i)], grid.yc[static_cast<std::size_t>(j)],
                    grid.cell_r[c], grid.cell_xn[c], grid.cell_vol[c]);
      os << buf;
    }
  }
}

}  // namespace gaplab::geom

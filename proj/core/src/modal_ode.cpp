#include "gaplab/modal_ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gaplab::ode {

namespace {

struct Stencil {
  double w_minus, w_zero, w_plus;  // first derivative
  double s_minus, s_zero, s_plus;  // second derivative
};

Stencil nonuniform_stencil(double hm, double hp) {
  Stencil s;
  const double span = hm + hp;
  s.w_minus = -hp / (hm * span);
  s.w_zero = (hp - hm) / (hm * hp);
  s.w_plus = hm / (hp * span);
  s.s_minus = 2.0 / (hm * span);
  s.s_zero = -2.0 / (hm * hp);
  s.s_plus = 2.0 / (hp * span);
  return s;
}

/// derivative at xc from values at three abscissae (quadratic fit)
double three_point_derivative(double x0, double x1, double x2, double v0,
                              double v1, double v2, double xc) {
  const double d01 = x1 - x0;
  const double d02 = x2 - x0;
  const double d12 = x2 - x1;
  const double l0 = (2.0 * xc - x1 - x2) / (d01 * d02);
  const double l1 = (2.0 * xc - x0 - x2) / (-d01 * d12);
  const double l2 = (2.0 * xc - x0 - x1) / (d02 * d12);
  return v0 * l0 + v1 * l1 + v2 * l2;
}

double kahan_add(double& sum, double& comp, double term) {
  const double y = term - comp;
  const double t = sum + y;
  comp = (t - sum) - y;
  sum = t;
  return sum;
}

}  // namespace

ModalOperatorParams::ModalOperatorParams(int n_, double eps_, int k_)
    : n(n_), eps(eps_), k(k_) {
  rates::Dimension check(n_);
  if (eps_ <= 0.0) throw std::domain_error("ModalOperatorParams: eps must be > 0");
  if (k_ < 0) throw std::domain_error("ModalOperatorParams: k must be >= 0");
}

ModalBvp assemble_modal_bvp(const ModalOperatorParams& params,
                            std::span<const double> r, double left_value,
                            double right_value, std::span<const double> forcing) {
  const int m = static_cast<int>(r.size());
  if (m < 3) throw std::invalid_argument("assemble_modal_bvp: need >= 3 nodes");
  if (!forcing.empty() && static_cast<int>(forcing.size()) != m) {
    throw std::invalid_argument("assemble_modal_bvp: forcing size mismatch");
  }
  const double mu = params.mu();
  ModalBvp bvp;
  const int interior = m - 2;
  bvp.matrix.sub.assign(static_cast<std::size_t>(interior) - 1, 0.0);
  bvp.matrix.diag.assign(static_cast<std::size_t>(interior), 0.0);
  bvp.matrix.super.assign(static_cast<std::size_t>(interior) - 1, 0.0);
  bvp.rhs.assign(static_cast<std::size_t>(interior), 0.0);

  for (int i = 1; i <= m - 2; ++i) {
    const double ri = r[static_cast<std::size_t>(i)];
    const double hm = ri - r[static_cast<std::size_t>(i) - 1];
    const double hp = r[static_cast<std::size_t>(i) + 1] - ri;
    const Stencil st = nonuniform_stencil(hm, hp);
    const double conv = (params.n - 2.0) / ri + 2.0 * ri / (params.eps + ri * ri);
    const double west = st.s_minus + conv * st.w_minus;
    const double center = st.s_zero + conv * st.w_zero - mu / (ri * ri);
    const double east = st.s_plus + conv * st.w_plus;
    if (west <= 0.0 || east <= 0.0 ||
        -center < (west + east) * (1.0 - 1e-12)) {
      bvp.diagonally_dominant = false;
    }
    const int row = i - 1;
    bvp.matrix.diag[static_cast<std::size_t>(row)] = -center;
    if (row > 0) bvp.matrix.sub[static_cast<std::size_t>(row) - 1] = -west;
    if (row < interior - 1) bvp.matrix.super[static_cast<std::size_t>(row)] = -east;
    double rhs = forcing.empty() ? 0.0 : -forcing[static_cast<std::size_t>(i)];
    if (i == 1) rhs += west * left_value;
    if (i == m - 2) rhs += east * right_value;
    bvp.rhs[static_cast<std::size_t>(row)] = rhs;
  }
  return bvp;
}

std::vector<double> apply_modal_operator(const ModalOperatorParams& params,
                                         std::span<const double> r,
                                         std::span<const double> v) {
  const int m = static_cast<int>(r.size());
  if (static_cast<int>(v.size()) != m) {
    throw std::invalid_argument("apply_modal_operator: size mismatch");
  }
  const double mu = params.mu();
  std::vector<double> out(static_cast<std::size_t>(m) - 2);
  for (int i = 1; i <= m - 2; ++i) {
    const double ri = r[static_cast<std::size_t>(i)];
    const double hm = ri - r[static_cast<std::size_t>(i) - 1];
    const double hp = r[static_cast<std::size_t>(i) + 1] - ri;
    const Stencil st = nonuniform_stencil(hm, hp);
    const double conv = (params.n - 2.0) / ri + 2.0 * ri / (params.eps + ri * ri);
    const double vm = v[static_cast<std::size_t>(i) - 1];
    const double v0 = v[static_cast<std::size_t>(i)];
    const double vp = v[static_cast<std::size_t>(i) + 1];
    out[static_cast<std::size_t>(i) - 1] =
        st.s_minus * vm + st.s_zero * v0 + st.s_plus * vp +
        conv * (st.w_minus * vm + st.w_zero * v0 + st.w_plus * vp) -
        mu / (ri * ri) * v0;
  }
  return out;
}

double OdeSolution::value_at(double rq) const {
  if (r.empty()) throw std::logic_error("OdeSolution::value_at: empty solution");
  if (rq <= r.front()) return v.front();
  if (rq >= r.back()) return v.back();
  auto it = std::upper_bound(r.begin(), r.end(), rq);
  const std::size_t hi = static_cast<std::size_t>(it - r.begin());
  const std::size_t lo = hi - 1;
  const double t = (rq - r[lo]) / (r[hi] - r[lo]);
  return (1.0 - t) * v[lo] + t * v[hi];
}

namespace {

enum class LeftAnchor { linear, zero };

std::vector<double> solve_level(const ModalOperatorParams& params,
                                std::span<const double> r, double left_value,
                                double right_value) {
  const ModalBvp bvp = assemble_modal_bvp(params, r, left_value, right_value);
  std::vector<double> interior = linalg::thomas_solve(bvp.matrix, bvp.rhs);
  std::vector<double> full(r.size());
  full.front() = left_value;
  full.back() = right_value;
  std::copy(interior.begin(), interior.end(), full.begin() + 1);
  return full;
}

OdeSolution solve_with_anchor(const ModalOperatorParams& params,
                              double right_value, LeftAnchor anchor,
                              const ModalSolveOptions& opts) {
  const double a_request =
      opts.a_cut > 0.0 ? opts.a_cut : std::max(1e-8, 1e-4 * params.eps);
  RadialGrid master = RadialGrid::geometric(a_request / 4.0, opts.points_per_octave);
  const int ppo = master.points_per_octave;

  // Cutoff levels a, a/2, a/4 are exactly ppo nodes apart.
  const int total = master.size();
  if (total < 2 * ppo + 8) {
    throw std::invalid_argument("solve_bounded_mode: cutoff too close to 1");
  }
  std::array<std::span<const double>, 3> grids = {
      std::span<const double>(master.r).subspan(2 * ppo),
      std::span<const double>(master.r).subspan(ppo),
      std::span<const double>(master.r),
  };
  std::array<std::vector<double>, 3> levels;
  for (int l = 0; l < 3; ++l) {
    const double a_l = grids[static_cast<std::size_t>(l)].front();
    const double left = (anchor == LeftAnchor::linear) ? a_l : 0.0;
    levels[static_cast<std::size_t>(l)] =
        solve_level(params, grids[static_cast<std::size_t>(l)], left, right_value);
  }

  // Aitken extrapolation on the common node set [a, 1].
  OdeSolution sol;
  const std::size_t m = grids[0].size();
  sol.r.assign(grids[0].begin(), grids[0].end());
  sol.v.resize(m);
  sol.right_value = right_value;
  double scale = 0.0;
  for (double val : levels[2]) scale = std::max(scale, std::fabs(val));
  double max_spread = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x0 = levels[0][i];
    const double x1 = levels[1][i + static_cast<std::size_t>(ppo)];
    const double x2 = levels[2][i + static_cast<std::size_t>(2 * ppo)];
    const double denom = x0 - 2.0 * x1 + x2;
    double extrap = x2;
    if (std::fabs(denom) > 1e-14 * scale) {
      const double corr = (x2 - x1) * (x2 - x1) / denom;
      if (std::fabs(corr) <= std::fabs(x2 - x1)) extrap = x2 - corr;
    }
    sol.v[i] = extrap;
    if (scale > 0.0) {
      max_spread = std::max(max_spread, std::fabs(extrap - x2) / scale);
    }
  }
  sol.left_value = sol.v.front();

  sol.extrapolation.a_levels = {grids[0].front(), grids[1].front(), grids[2].front()};
  const double probe_target = std::sqrt(params.eps);
  std::size_t probe = 0;
  double best = 1e300;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = std::fabs(sol.r[i] - probe_target);
    if (d < best) {
      best = d;
      probe = i;
    }
  }
  sol.extrapolation.probe_r = sol.r[probe];
  sol.extrapolation.probe_values = {levels[0][probe],
                                    levels[1][probe + static_cast<std::size_t>(ppo)],
                                    levels[2][probe + static_cast<std::size_t>(2 * ppo)]};
  sol.extrapolation.probe_extrapolated = sol.v[probe];
  sol.extrapolation.max_rel_spread = max_spread;

  sol.dv.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t c = std::min(std::max<std::size_t>(i, 1), m - 2);
    sol.dv[i] = three_point_derivative(sol.r[c - 1], sol.r[c], sol.r[c + 1],
                                       sol.v[c - 1], sol.v[c], sol.v[c + 1], sol.r[i]);
  }
  return sol;
}

}  // namespace

OdeSolution solve_bounded_mode(const ModalOperatorParams& params,
                               double right_value, const ModalSolveOptions& opts) {
  return solve_with_anchor(params, right_value, LeftAnchor::zero, opts);
}

OdeSolution solve_h(const ModalOperatorParams& params, const ModalSolveOptions& opts) {
  if (params.k != 1) {
    throw std::invalid_argument("solve_h: the h-function is the k = 1 mode");
  }
  OdeSolution sol = solve_with_anchor(params, 1.0, LeftAnchor::linear, opts);
  for (std::size_t i = 1; i < sol.v.size(); ++i) {
    if (!(sol.v[i] > sol.v[i - 1])) {
      throw std::runtime_error(
          "solve_h: discrete solution is not strictly increasing (grid too coarse?)");
    }
  }
  return sol;
}

HBoundCertificate verify_h_bounds(const OdeSolution& sol, rates::Dimension dim,
                                  double eps, double beta) {
  const double bstar = rates::beta_star(dim);
  if (beta < bstar - 1e-12) {
    throw std::invalid_argument(
        "verify_h_bounds: beta = " + std::to_string(beta) +
        " fails the subsolution condition (needs beta >= beta_star = " +
        std::to_string(bstar) + ")");
  }
  HBoundCertificate cert;
  cert.beta = beta;
  cert.alpha = rates::alpha(dim);
  cert.min_h_over_r = 1e300;
  cert.max_h_over_r_alpha = 0.0;
  cert.inf_envelope_ratio = 1e300;
  cert.monotone = true;
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    const double r = sol.r[i];
    const double h = sol.v[i];
    cert.min_h_over_r = std::min(cert.min_h_over_r, h / r);
    cert.max_h_over_r_alpha = std::max(cert.max_h_over_r_alpha, h / std::pow(r, cert.alpha));
    const double envelope =
        std::pow(r, beta) * std::pow(eps + r * r, 0.5 * (cert.alpha - beta));
    cert.inf_envelope_ratio = std::min(cert.inf_envelope_ratio, h / envelope);
    if (i > 0 && !(sol.v[i] > sol.v[i - 1])) cert.monotone = false;
  }
  cert.lower_pass = cert.min_h_over_r >= 1.0 - 1e-8;
  cert.upper_pass = cert.max_h_over_r_alpha <= 1.0 + 1e-8;
  cert.pass = cert.lower_pass && cert.upper_pass && cert.monotone;
  return cert;
}

DecayRecord modal_decay_check(const ModalOperatorParams& params, double right_value,
                              const ModalSolveOptions& opts) {
  if (params.k < 1) {
    throw std::invalid_argument("modal_decay_check: requires k >= 1 (k = 0 is vacuous)");
  }
  DecayRecord rec;
  rec.k = params.k;
  rec.alpha_k = rates::alpha_k(rates::Dimension(params.n), params.k);
  rec.solution = solve_bounded_mode(params, right_value, opts);
  const double v1 = std::fabs(right_value);
  if (v1 == 0.0) throw std::invalid_argument("modal_decay_check: V(1) must be nonzero");
  rec.max_ratio = 0.0;
  for (std::size_t i = 0; i < rec.solution.r.size(); ++i) {
    const double bound = std::pow(rec.solution.r[i], rec.alpha_k) * v1;
    rec.max_ratio = std::max(rec.max_ratio, std::fabs(rec.solution.v[i]) / bound);
  }
  rec.pass = rec.max_ratio <= 1.0 + 1e-6;
  return rec;
}

void ForcingDecomposition::measure_bounds(std::span<const double> r) {
  sup_A_over_r = 0.0;
  sup_B = 0.0;
  for (double ri : r) {
    sup_A_over_r = std::max(sup_A_over_r, std::fabs(A(ri)) / ri);
    sup_B = std::max(sup_B, std::fabs(B(ri)));
  }
}

ParticularSolution particular_solution(const ModalOperatorParams& params,
                                       const OdeSolution& h,
                                       const ForcingDecomposition& forcing) {
  if (params.k != 1) {
    throw std::invalid_argument("particular_solution: reduction of order uses k = 1");
  }
  const std::size_t m = h.r.size();
  const double eps = params.eps;
  const int nm2 = params.n - 2;
  auto weight = [&](double r, double hval) {
    double rp = 1.0;
    for (int i = 0; i < nm2; ++i) rp *= r;
    return hval * rp * (eps + r * r);
  };

  // inner(s) = int_0^s h t^{n-2}(eps+t^2) (A' + B) dt, A' by parts
  std::vector<double> inner(m, 0.0);
  double acc = 0.0, comp = 0.0;
  for (std::size_t i = 1; i < m; ++i) {
    const double r0 = h.r[i - 1];
    const double r1 = h.r[i];
    const double hmid = 0.5 * (h.v[i - 1] + h.v[i]);
    const double rmid = 0.5 * (r0 + r1);
    const double gmid = weight(rmid, hmid);
    const double da = forcing.A(r1) - forcing.A(r0);
    const double bmid = forcing.B(rmid);
    kahan_add(acc, comp, gmid * da + gmid * bmid * (r1 - r0));
    inner[i] = acc;
  }

  ParticularSolution out;
  out.v.r = h.r;
  out.v.v.assign(m, 0.0);
  std::vector<double> w(m, 0.0);
  acc = 0.0;
  comp = 0.0;
  for (std::size_t i = 1; i < m; ++i) {
    const double r0 = h.r[i - 1];
    const double r1 = h.r[i];
    const double hmid = 0.5 * (h.v[i - 1] + h.v[i]);
    const double rmid = 0.5 * (r0 + r1);
    const double gmid = weight(rmid, hmid) * hmid;  // G = h^2 r^{n-2}(eps+r^2)
    if (!(gmid > 0.0)) {
      throw std::runtime_error("particular_solution: quadrature weight vanished near 0");
    }
    const double imid = 0.5 * (inner[i - 1] + inner[i]);
    kahan_add(acc, comp, imid / gmid * (r1 - r0));
    w[i] = acc;
  }
  out.sup_ratio = 0.0;
  const double alpha = rates::alpha(rates::Dimension(params.n));
  for (std::size_t i = 0; i < m; ++i) {
    out.v.v[i] = h.v[i] * w[i];
    out.sup_ratio = std::max(out.sup_ratio,
                             std::fabs(out.v.v[i]) / std::pow(h.r[i], 1.0 + alpha));
  }
  out.v.left_value = out.v.v.front();
  out.v.right_value = out.v.v.back();
  out.v.dv.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t c = std::min(std::max<std::size_t>(i, 1), m - 2);
    out.v.dv[i] = three_point_derivative(h.r[c - 1], h.r[c], h.r[c + 1],
                                         out.v.v[c - 1], out.v.v[c], out.v.v[c + 1],
                                         h.r[i]);
  }
  return out;
}

U11Decomposition u11_decompose(std::span<const double> r_samples,
                               std::span<const double> u_samples,
                               const OdeSolution& h, double alpha,
                               double window_lo, double window_hi) {
  if (r_samples.size() != u_samples.size()) {
    throw std::invalid_argument("u11_decompose: sample size mismatch");
  }
  std::vector<double> r, u, hb, pb;
  for (std::size_t i = 0; i < r_samples.size(); ++i) {
    if (r_samples[i] < window_lo || r_samples[i] > window_hi) continue;
    r.push_back(r_samples[i]);
    u.push_back(u_samples[i]);
    hb.push_back(h.value_at(r_samples[i]));
    pb.push_back(std::pow(r_samples[i], 1.0 + alpha));
  }
  if (r.size() < 4) {
    throw std::invalid_argument("u11_decompose: fewer than 4 samples in the window");
  }
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    s11 += hb[i] * hb[i];
    s12 += hb[i] * pb[i];
    s22 += pb[i] * pb[i];
    b1 += hb[i] * u[i];
    b2 += pb[i] * u[i];
  }
  const double det = s11 * s22 - s12 * s12;
  if (!(std::fabs(det) > 1e-12 * s11 * s22)) {
    throw std::invalid_argument("u11_decompose: ill-conditioned fit window");
  }
  U11Decomposition d;
  d.c1 = (b1 * s22 - b2 * s12) / det;
  d.remainder_coeff = (s11 * b2 - s12 * b1) / det;

  double umax = 0.0;
  std::vector<double> resid(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    resid[i] = std::fabs(u[i] - d.c1 * hb[i]);
    d.remainder_sup = std::max(d.remainder_sup, resid[i]);
    umax = std::max(umax, std::fabs(u[i]));
  }
  d.remainder_negligible = d.remainder_sup <= 1e-12 * umax;
  if (!d.remainder_negligible) {
    bool all_positive = true;
    for (double e : resid) all_positive = all_positive && e > 0.0;
    if (all_positive && r.size() >= 4) {
      d.remainder_fit = fitting::fit_rate(r, resid);
    }
  }
  return d;
}

double weighted_norm(std::span<const double> r, std::span<const double> f,
                     double eps, double gamma, double s) {
  if (r.size() != f.size()) throw std::invalid_argument("weighted_norm: size mismatch");
  double sup = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double denom = std::pow(r[i], gamma) * std::pow(eps + r[i] * r[i], 1.0 - s);
    sup = std::max(sup, std::fabs(f[i]) / denom);
  }
  return sup;
}

DecayProfile decay_profile(std::span<const OdeSolution* const> modes,
                           std::span<const double> rho) {
  DecayProfile profile;
  profile.rho.assign(rho.begin(), rho.end());
  profile.omega.resize(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double sq = 0.0;
    for (const OdeSolution* mode : modes) {
      const double v = mode->value_at(rho[i]);
      sq += v * v;
    }
    profile.omega[i] = std::sqrt(sq);
  }
  bool positive = rho.size() >= 4;
  for (double w : profile.omega) positive = positive && w > 0.0;
  if (positive) profile.fit = fitting::fit_rate(profile.rho, profile.omega);
  return profile;
}

}  // namespace gaplab::ode

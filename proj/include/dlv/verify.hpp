#pragma once

// Cross-checks: PDE residuals of analytic solutions, simulation against exact
// fields, decay of the competition BVP, and reduction consistency.

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dlv/pde.hpp"
#include "dlv/solutions.hpp"
#include "dlv/symmetry.hpp"

namespace dlv {

inline constexpr double kSimulationTolerance = 1e-3;
inline constexpr int kExclusionCells = 3;
inline constexpr double kMaxExcludedFraction = 0.05;

// ---------------------------------------------------------------------------
// Analytic residuals

struct ResidualReport {
  double max_u = 0.0, max_v = 0.0;    // max |S1|, |S2|
  double mean_u = 0.0, mean_v = 0.0;
  double max_scaled = 0.0;            // max |S| / (1 + largest term)
  int evaluated = 0;
  int excluded = 0;
  double tolerance = sym::kIdentityTolerance;
  bool unreliable = false;
  bool pass = false;

  double max() const { return std::max(max_u, max_v); }

  std::string to_text() const {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "u-equation: max_resid=%.6e mean_resid=%.6e\n"
                  "v-equation: max_resid=%.6e mean_resid=%.6e\n"
                  "evaluated: %d\nexcluded: %d\ntolerance: %.1e\n%sresult: %s\n",
                  max_u, mean_u, max_v, mean_v, evaluated, excluded, tolerance,
                  unreliable ? "warning: more than 5% of points excluded, report unreliable\n" : "",
                  pass ? "pass" : "fail");
    return buf;
  }
};

// S1 = l1 u_t - u_xx - F, S2 = l2 v_t - v_xx - G from an analytic jet on every
// grid node. Nodes within 3 cells of a singular locus, or where evaluation
// hits a pole, are excluded.
inline ResidualReport residual_report(const JetFunction& jet, const DlvParams& p, const GridSpec& grid,
                                      const std::vector<Singularity>& loci = {},
                                      double tol = sym::kIdentityTolerance) {
  grid.validate();
  ResidualReport r;
  r.tolerance = tol;
  const double radius = kExclusionCells * grid.dx();
  double sum_u = 0.0, sum_v = 0.0;
  for (int i = 0; i < grid.nt; ++i) {
    for (int j = 0; j < grid.nx; ++j) {
      const double t = grid.t(i), x = grid.x(j);
      if (distance_to_singularity(loci, x) < radius) {
        ++r.excluded;
        continue;
      }
      FieldJet d;
      try {
        d = jet(t, x);
      } catch (const sym::EvalError&) {
        ++r.excluded;
        continue;
      }
      const double F = p.reaction_u(d.u, d.v), G = p.reaction_v(d.u, d.v);
      const double s1 = std::fabs(p.lambda1 * d.u_t - d.u_xx - F);
      const double s2 = std::fabs(p.lambda2 * d.v_t - d.v_xx - G);
      const double scale1 = std::max({std::fabs(p.lambda1 * d.u_t), std::fabs(d.u_xx), std::fabs(F)});
      const double scale2 = std::max({std::fabs(p.lambda2 * d.v_t), std::fabs(d.v_xx), std::fabs(G)});
      r.max_u = std::max(r.max_u, s1);
      r.max_v = std::max(r.max_v, s2);
      r.max_scaled = std::max({r.max_scaled, s1 / (1 + scale1), s2 / (1 + scale2)});
      sum_u += s1;
      sum_v += s2;
      ++r.evaluated;
    }
  }
  if (r.evaluated > 0) {
    r.mean_u = sum_u / r.evaluated;
    r.mean_v = sum_v / r.evaluated;
  }
  const double total = static_cast<double>(grid.nt) * grid.nx;
  r.unreliable = r.excluded > kMaxExcludedFraction * total || r.evaluated == 0;
  r.pass = !r.unreliable && r.max() <= tol;
  return r;
}

// Residual of a catalog family in `target` (defaults to the family's host).
inline ResidualReport pde_residual_field(const std::string& id, const sym::Bindings& params, const GridSpec& grid,
                                         const DlvParams& target, double tol = sym::kIdentityTolerance) {
  auto ev = std::make_shared<const SolutionEvaluator>(id, params);
  return residual_report([ev](double t, double x) { return ev->jet(t, x); }, target, grid,
                         singular_loci(find_family(id), params), tol);
}

inline ResidualReport pde_residual_field(const std::string& id, const sym::Bindings& params, const GridSpec& grid,
                                         double tol = sym::kIdentityTolerance) {
  return pde_residual_field(id, params, grid, expand(family_system(id, params)), tol);
}

// 50 x 50 grid over the family's default window.
inline GridSpec window_grid(const std::string& id, const sym::Bindings& params, int n = 50) {
  const Window w = default_window(id, params);
  return {w.t0, w.t1, w.x0, w.x1, n, n};
}

// ---------------------------------------------------------------------------
// Field comparison

struct ErrorNorms {
  std::vector<double> t;
  std::vector<double> linf;  // max over both fields
  std::vector<double> l2;    // trapezoidal L2 in x, max over both fields

  double max_linf() const {
    double m = 0.0;
    for (double e : linf) m = std::max(m, e);
    return m;
  }
};

inline ErrorNorms compare_fields(const GridField& a, const GridField& b) {
  if (!(a.spec == b.spec) || a.u.size() != b.u.size() || a.v.size() != b.v.size()) {
    throw std::invalid_argument("compare_fields: grids differ");
  }
  const GridSpec& g = a.spec;
  const double dx = g.dx();
  ErrorNorms n;
  for (int i = 0; i < g.nt; ++i) {
    double mi = 0.0, su = 0.0, sv = 0.0;
    for (int j = 0; j < g.nx; ++j) {
      const double eu = std::fabs(a.u_at(i, j) - b.u_at(i, j));
      const double ev = std::fabs(a.v_at(i, j) - b.v_at(i, j));
      const double w = (j == 0 || j == g.nx - 1) ? 0.5 * dx : dx;
      mi = std::max({mi, eu, ev});
      su += w * eu * eu;
      sv += w * ev * ev;
    }
    n.t.push_back(g.t(i));
    n.linf.push_back(mi);
    n.l2.push_back(std::sqrt(std::max(su, sv)));
  }
  return n;
}

// ---------------------------------------------------------------------------
// Asymptotics

struct AsymptoticReport {
  std::vector<double> t;
  std::vector<double> dev_u;  // sup_x |U - U*|
  std::vector<double> dev_v;  // sup_x |V - V*|
  double rate = std::numeric_limits<double>::quiet_NaN();  // fitted d/dt log sup|V - V*|
  int fit_points = 0;

  std::string to_text() const {
    std::ostringstream os;
    char buf[160];
    os << "t,sup_dev_u,sup_dev_v\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e\n", t[i], dev_u[i], dev_v[i]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "fitted_rate: %.6e\nfit_points: %d\n", rate, fit_points);
    os << buf;
    return os.str();
  }
};

// Least-squares rate of log sup|V - V*| over the final half of the slices;
// slices with zero deviation are skipped (rate stays NaN if fewer than two).
inline AsymptoticReport asymptotic_report(const Trajectory& tr, std::pair<double, double> steady) {
  AsymptoticReport r;
  const GridField& f = tr.field;
  const int last = static_cast<int>(tr.times.size());
  for (int i = 0; i < last; ++i) {
    double du = 0.0, dv = 0.0;
    for (int j = 0; j < f.spec.nx; ++j) {
      du = std::max(du, std::fabs(f.u_at(i, j) - steady.first));
      dv = std::max(dv, std::fabs(f.v_at(i, j) - steady.second));
    }
    r.t.push_back(tr.times[i]);
    r.dev_u.push_back(du);
    r.dev_v.push_back(dv);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int i = (last - 1) / 2; i < last; ++i) {
    if (!(r.dev_v[i] > 0.0)) continue;
    const double x = r.t[i], y = std::log(r.dev_v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  r.fit_points = n;
  if (n >= 2) {
    const double den = n * sxx - sx * sx;
    if (den > 0) r.rate = (n * sxy - sx * sy) / den;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Reduction consistency

struct ReductionReport {
  double max_resid = 0.0;
  int points = 0;
  bool blown_up = false;
  double last_valid_w = 0.0;
  OdeTrajectory profiles;
};

// Integrates the row's reduced ODEs from `ics` at w_lo over [w_lo, w_hi],
// pushes the profiles through the ansatz at nt times in [t_lo, t_hi], and
// evaluates the PDE residual there. Time derivatives are analytic; phi'' comes
// from a fourth-order difference of the integrated phi', so the residual does
// not reuse the reduced right-hand side.
inline ReductionReport reduction_consistency(const std::string& row, const sym::Bindings& params, double w_lo,
                                             double w_hi, const ProfileState& ics, double t_lo = 0.0,
                                             double t_hi = 1.0, int steps = 400, int nt = 11) {
  const BoundRow b = bind_row(find_row(row), params);
  ReductionReport r;
  r.profiles = ode_integrate(reduced_rhs(b), ics, w_lo, w_hi, steps);
  r.blown_up = r.profiles.blown_up;
  r.last_valid_w = r.profiles.last_valid_x;
  if (r.blown_up) return r;

  const auto [e1, e2] = reduction_residual_exprs(b, true);
  const std::vector<std::string> slots{"t", "x", "p1", "d1", "p2", "d2", "q1", "q2"};
  const sym::Compiled c1(e1, slots), c2(e2, slots);
  const auto& S = r.profiles.state;
  const double h = (w_hi - w_lo) / steps;
  for (int k = 2; k + 2 <= steps; ++k) {
    const double q1 = (-S[k + 2].d1 + 8 * S[k + 1].d1 - 8 * S[k - 1].d1 + S[k - 2].d1) / (12 * h);
    const double q2 = (-S[k + 2].d2 + 8 * S[k + 1].d2 - 8 * S[k - 1].d2 + S[k - 2].d2) / (12 * h);
    for (int i = 0; i < nt; ++i) {
      const double t = nt == 1 ? t_lo : t_lo + (t_hi - t_lo) * i / (nt - 1);
      const double x = r.profiles.x[k] + b.speed * t;
      const double at[8] = {t, x, S[k].p1, S[k].d1, S[k].p2, S[k].d2, q1, q2};
      r.max_resid = std::max({r.max_resid, std::fabs(c1(at)), std::fabs(c2(at))});
      ++r.points;
    }
  }
  return r;
}

}  // namespace dlv

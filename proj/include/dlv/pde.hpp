#pragma once

// Method-of-lines solver for the DLV system, the constant-Dirichlet competition
// boundary-value problem, and an RK4 integrator for the reduced ODE systems.
//
// The equations are integrated literally as u_t = (u_xx + F)/lambda1,
// v_t = (v_xx + G)/lambda2 with second-order central differences in x.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlv/model.hpp"
#include "dlv/solutions.hpp"

namespace dlv {

class CflError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kBlowUp = 1e15;

// ---------------------------------------------------------------------------
// Boundary conditions

enum class BcKind { Dirichlet, NeumannZero, FromExact };

struct BoundaryCondition {
  BcKind kind = BcKind::NeumannZero;
  std::function<std::pair<double, double>(double t)> value;  // Dirichlet
  std::shared_ptr<const SolutionEvaluator> exact;            // FromExact

  static BoundaryCondition dirichlet(std::function<std::pair<double, double>(double)> f) {
    return {BcKind::Dirichlet, std::move(f), nullptr};
  }
  static BoundaryCondition dirichlet(double u, double v) {
    return dirichlet([u, v](double) { return std::pair{u, v}; });
  }
  static BoundaryCondition neumann_zero() { return {}; }
  // Throws ConstraintError if the family's constraints fail.
  static BoundaryCondition from_exact(const std::string& family, const sym::Bindings& params) {
    return {BcKind::FromExact, nullptr, std::make_shared<const SolutionEvaluator>(family, params)};
  }

  // Boundary value at time t and position x (only for the Dirichlet kinds).
  std::pair<double, double> at(double t, double x) const {
    if (kind == BcKind::Dirichlet) return value(t);
    return exact->value(t, x);
  }
};

// ---------------------------------------------------------------------------
// Schemes

enum class SchemeKind { ImexCN, ExplicitRK4 };

struct Scheme {
  SchemeKind kind = SchemeKind::ImexCN;
  double dt = 0.0;  // 0 selects the automatic step
};

inline const char* scheme_name(SchemeKind k) { return k == SchemeKind::ImexCN ? "imex_cn" : "explicit_rk4"; }

inline SchemeKind parse_scheme(const std::string& s) {
  if (s == "imex_cn") return SchemeKind::ImexCN;
  if (s == "explicit_rk4") return SchemeKind::ExplicitRK4;
  throw ConfigError("unknown scheme '" + s + "'");
}

struct Trajectory {
  GridField field;
  std::vector<double> times;     // time stamps of the completed output slices
  std::vector<std::string> log;  // step adjustments and termination notes
  bool terminated = false;       // blow-up stopped the run early
  double last_valid_t = 0.0;
  double dt = 0.0;
  long steps = 0;
};

using InitialProfile = std::function<std::pair<double, double>(double x)>;

namespace detail {

// Discrete Laplacian (without 1/dx^2); ends use the zero-flux reflection.
inline void laplacian(const std::vector<double>& f, std::vector<double>& out) {
  const std::size_t n = f.size();
  out[0] = 2 * (f[1] - f[0]);
  out[n - 1] = 2 * (f[n - 2] - f[n - 1]);
  for (std::size_t j = 1; j + 1 < n; ++j) out[j] = f[j - 1] - 2 * f[j] + f[j + 1];
}

// Constant tridiagonal system (I - (r/2) D) with the boundary rows fixed
// by the side kinds, pre-factored for the Thomas sweep.
class CnOperator {
 public:
  CnOperator(std::size_t n, double r, bool left_dirichlet, bool right_dirichlet) : lower_(n), diag_(n), upper_(n) {
    const double h = 0.5 * r;
    for (std::size_t j = 0; j < n; ++j) {
      lower_[j] = -h;
      diag_[j] = 1 + 2 * h;
      upper_[j] = -h;
    }
    lower_[0] = 0;
    upper_[n - 1] = 0;
    if (left_dirichlet) {
      diag_[0] = 1;
      upper_[0] = 0;
    } else {
      upper_[0] = -2 * h;
    }
    if (right_dirichlet) {
      diag_[n - 1] = 1;
      lower_[n - 1] = 0;
    } else {
      lower_[n - 1] = -2 * h;
    }
    // forward elimination coefficients
    cprime_.resize(n);
    denom_.resize(n);
    denom_[0] = diag_[0];
    cprime_[0] = upper_[0] / denom_[0];
    for (std::size_t j = 1; j < n; ++j) {
      denom_[j] = diag_[j] - lower_[j] * cprime_[j - 1];
      cprime_[j] = upper_[j] / denom_[j];
    }
  }

  void solve(std::vector<double>& rhs) const {
    const std::size_t n = rhs.size();
    rhs[0] /= denom_[0];
    for (std::size_t j = 1; j < n; ++j) rhs[j] = (rhs[j] - lower_[j] * rhs[j - 1]) / denom_[j];
    for (std::size_t j = n - 1; j-- > 0;) rhs[j] -= cprime_[j] * rhs[j + 1];
  }

 private:
  std::vector<double> lower_, diag_, upper_, cprime_, denom_;
};

inline bool finite_state(const std::vector<double>& u, const std::vector<double>& v) {
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (!std::isfinite(u[j]) || !std::isfinite(v[j]) || std::fabs(u[j]) > kBlowUp || std::fabs(v[j]) > kBlowUp) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

// Largest stable explicit step: 0.5 * min(lambda) * dx^2.
inline double explicit_dt_bound(const DlvParams& p, double dx) {
  return 0.5 * std::min(p.lambda1, p.lambda2) * dx * dx;
}

inline Trajectory simulate(const SystemId& sys, const GridSpec& grid, const BoundaryCondition& left,
                           const BoundaryCondition& right, const InitialProfile& init, const Scheme& scheme = {}) {
  grid.validate();
  const DlvParams p = expand(sys);
  if (const auto v = validate_params(p); !v.empty()) throw ConfigError("simulate: invalid parameters: " + v[0].name);
  for (const auto* b : {&left, &right}) {
    if (b->kind == BcKind::Dirichlet && !b->value) throw ConfigError("simulate: Dirichlet side without a value");
    if (b->kind == BcKind::FromExact && !b->exact) throw ConfigError("simulate: from_exact side without a family");
  }

  const int nx = grid.nx;
  const double dx = grid.dx();
  const double slice = grid.dt();
  const double bound = explicit_dt_bound(p, dx);
  Trajectory tr;
  tr.field = GridField(grid);

  double target = scheme.dt;
  if (target <= 0.0) {
    target = scheme.kind == SchemeKind::ImexCN ? std::min(0.25 * dx * dx, (grid.t1 - grid.t0) / grid.nt)
                                               : std::min(bound, slice);
  } else if (scheme.kind == SchemeKind::ExplicitRK4 && target > bound) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "explicit_rk4: dt=%.3e exceeds the stability bound %.3e", target, bound);
    throw CflError(buf);
  }
  // Substeps land exactly on the output slices.
  const long sub = std::max(1L, static_cast<long>(std::ceil(slice / target - 1e-9)));
  const double dt = slice / sub;
  tr.dt = dt;
  if (dt < target * (1 - 1e-12)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "dt reduced from %.6e to %.6e to land on output slices", target, dt);
    tr.log.emplace_back(buf);
  }

  std::vector<double> u(nx), v(nx);
  for (int j = 0; j < nx; ++j) {
    std::tie(u[j], v[j]) = init(grid.x(j));
  }
  const bool ld = left.kind != BcKind::NeumannZero, rd = right.kind != BcKind::NeumannZero;
  const auto impose = [&](std::vector<double>& uu, std::vector<double>& vv, double t) {
    if (ld) std::tie(uu[0], vv[0]) = left.at(t, grid.x0);
    if (rd) std::tie(uu[nx - 1], vv[nx - 1]) = right.at(t, grid.x1);
  };
  impose(u, v, grid.t0);

  const auto store = [&](int i) {
    for (int j = 0; j < nx; ++j) {
      tr.field.u_at(i, j) = u[j];
      tr.field.v_at(i, j) = v[j];
    }
    tr.times.push_back(grid.t(i));
  };
  store(0);
  tr.last_valid_t = grid.t0;

  const double inv_dx2 = 1.0 / (dx * dx);
  std::vector<double> lu(nx), lv(nx), fu(nx), fv(nx), fu_old(nx), fv_old(nx);
  const auto reaction = [&](const std::vector<double>& uu, const std::vector<double>& vv, std::vector<double>& ru,
                            std::vector<double>& rv) {
    for (int j = 0; j < nx; ++j) {
      ru[j] = p.reaction_u(uu[j], vv[j]);
      rv[j] = p.reaction_v(uu[j], vv[j]);
    }
  };

  const auto fail = [&](int slice_index, double t) {
    tr.terminated = true;
    char buf[160];
    std::snprintf(buf, sizeof buf, "non-finite state at t=%.6e; stopped, last valid t=%.6e", t, tr.last_valid_t);
    tr.log.emplace_back(buf);
    for (int i = slice_index; i < grid.nt; ++i) {
      for (int j = 0; j < nx; ++j) {
        tr.field.u_at(i, j) = std::nan("");
        tr.field.v_at(i, j) = std::nan("");
      }
    }
  };

  if (scheme.kind == SchemeKind::ImexCN) {
    const double r1 = dt / p.lambda1 * inv_dx2, r2 = dt / p.lambda2 * inv_dx2;
    const detail::CnOperator A1(nx, r1, ld, rd), A2(nx, r2, ld, rd);
    std::vector<double> bu(nx), bv(nx);
    bool first = true;
    long step = 0;
    for (int i = 1; i < grid.nt; ++i) {
      for (long s = 0; s < sub; ++s, ++step) {
        const double t = grid.t(i - 1) + s * dt;
        const double tn = s + 1 == sub ? grid.t(i) : t + dt;
        detail::laplacian(u, lu);
        detail::laplacian(v, lv);
        reaction(u, v, fu, fv);
        for (int j = 0; j < nx; ++j) {
          const double ru = first ? fu[j] : 1.5 * fu[j] - 0.5 * fu_old[j];
          const double rv = first ? fv[j] : 1.5 * fv[j] - 0.5 * fv_old[j];
          bu[j] = u[j] + 0.5 * r1 * lu[j] + dt / p.lambda1 * ru;
          bv[j] = v[j] + 0.5 * r2 * lv[j] + dt / p.lambda2 * rv;
        }
        impose(bu, bv, tn);
        A1.solve(bu);
        A2.solve(bv);
        u.swap(bu);
        v.swap(bv);
        fu_old.swap(fu);
        fv_old.swap(fv);
        first = false;
        if (!detail::finite_state(u, v)) {
          tr.steps = step + 1;
          fail(i, tn);
          return tr;
        }
      }
      tr.last_valid_t = grid.t(i);
      store(i);
    }
    tr.steps = step;
    return tr;
  }

  // Classical RK4 on the semi-discrete system.
  std::vector<double> ku[4], kv[4];
  for (auto& k : ku) k.resize(nx);
  for (auto& k : kv) k.resize(nx);
  std::vector<double> su(nx), sv(nx);
  const auto rhs = [&](std::vector<double>& uu, std::vector<double>& vv, double t, std::vector<double>& du,
                       std::vector<double>& dv) {
    impose(uu, vv, t);
    detail::laplacian(uu, lu);
    detail::laplacian(vv, lv);
    reaction(uu, vv, fu, fv);
    for (int j = 0; j < nx; ++j) {
      du[j] = (lu[j] * inv_dx2 + fu[j]) / p.lambda1;
      dv[j] = (lv[j] * inv_dx2 + fv[j]) / p.lambda2;
    }
    if (ld) du[0] = dv[0] = 0.0;
    if (rd) du[nx - 1] = dv[nx - 1] = 0.0;
  };
  long step = 0;
  for (int i = 1; i < grid.nt; ++i) {
    for (long s = 0; s < sub; ++s, ++step) {
      const double t = grid.t(i - 1) + s * dt;
      const double tn = s + 1 == sub ? grid.t(i) : t + dt;
      const double c[4] = {0.0, 0.5, 0.5, 1.0};
      for (int k = 0; k < 4; ++k) {
        for (int j = 0; j < nx; ++j) {
          su[j] = k == 0 ? u[j] : u[j] + c[k] * dt * ku[k - 1][j];
          sv[j] = k == 0 ? v[j] : v[j] + c[k] * dt * kv[k - 1][j];
        }
        rhs(su, sv, t + c[k] * dt, ku[k], kv[k]);
      }
      for (int j = 0; j < nx; ++j) {
        u[j] += dt / 6 * (ku[0][j] + 2 * ku[1][j] + 2 * ku[2][j] + ku[3][j]);
        v[j] += dt / 6 * (kv[0][j] + 2 * kv[1][j] + 2 * kv[2][j] + kv[3][j]);
      }
      impose(u, v, tn);
      if (!detail::finite_state(u, v)) {
        tr.steps = step + 1;
        fail(i, tn);
        return tr;
      }
    }
    tr.last_valid_t = grid.t(i);
    store(i);
  }
  tr.steps = step;
  return tr;
}

// ---------------------------------------------------------------------------
// Scenarios

struct SimulationSetup {
  SystemId system;
  GridSpec grid;
  BoundaryCondition left, right;
  InitialProfile init;
  Scheme scheme;
  std::string family;  // exact comparison family, if any
  sym::Bindings family_params;
};

// Competition BVP on [0, pi/sqrt(-beta lambda1)] with U = a1/b, V = 0 at both
// ends and the sine initial profile of amplitude C2.
inline SimulationSetup make_bvp_theorem4(const system::Sys136& s, double C2, double horizon = 40.0, int nx = 101,
                                         int nt = 201) {
  const sym::Bindings p{{"lambda1", s.lambda1}, {"lambda2", s.lambda2}, {"a1", s.a1}, {"a2", s.a2},
                        {"b", s.b},             {"c", s.c},             {"C2", C2}};
  const auto v = check_constraints("eq134", p).violations;
  if (!v.empty()) throw ConstraintError("theorem4: " + v[0].name, v);
  const double be = beta(s.a1, s.a2, s.lambda1, s.lambda2);
  const double k = std::sqrt(-be * s.lambda1);
  SimulationSetup out;
  out.system = s;
  out.grid = {0.0, horizon, 0.0, std::numbers::pi / k, nt, nx};
  out.left = out.right = BoundaryCondition::dirichlet(s.a1 / s.b, 0.0);
  const double au = C2 / ((s.a1 - s.a2) * s.b), av = C2 / ((s.a2 - s.a1) * s.c);
  const double u_star = s.a1 / s.b;
  out.init = [=](double x) { return std::pair{u_star + au * std::sin(k * x), av * std::sin(k * x)}; };
  out.family = "eq134";
  out.family_params = p;
  return out;
}

// Boundary names accepted in scenario files: from_exact, theorem4,
// neumann_zero, dirichlet_zero.
inline SimulationSetup setup_from_scenario(const Scenario& sc) {
  const SystemId sys = sc.system();
  const sym::Bindings all = sc.all_params();
  if (sc.bc == "theorem4") {
    const auto* s = std::get_if<system::Sys136>(&sys);
    if (s == nullptr) throw ConfigError("bc theorem4 needs system sys136");
    const auto it = all.find("C2");
    if (it == all.end()) throw ConfigError("bc theorem4 needs family_params.C2");
    SimulationSetup out = make_bvp_theorem4(*s, it->second, sc.grid.t1 - sc.grid.t0, sc.grid.nx, sc.grid.nt);
    out.grid.t0 = sc.grid.t0;
    out.grid.t1 = sc.grid.t1;
    out.scheme = {parse_scheme(sc.scheme), sc.dt};
    return out;
  }
  SimulationSetup out;
  out.system = sys;
  out.grid = sc.grid;
  out.grid.validate();
  out.scheme = {parse_scheme(sc.scheme), sc.dt};
  out.family = sc.family;
  out.family_params = all;
  if (sc.family.empty()) throw ConfigError("scenario needs a family for the initial profile");
  if (find_family(sc.family).host != sc.system_name) {
    throw ConfigError("family " + sc.family + " lives on " + find_family(sc.family).host + ", not " + sc.system_name);
  }
  auto ev = std::make_shared<const SolutionEvaluator>(sc.family, all);
  const double t0 = sc.grid.t0;
  out.init = [ev, t0](double x) { return ev->value(t0, x); };
  if (sc.bc == "from_exact") {
    out.left = out.right = BoundaryCondition{BcKind::FromExact, nullptr, ev};
  } else if (sc.bc == "neumann_zero") {
    out.left = out.right = BoundaryCondition::neumann_zero();
  } else if (sc.bc == "dirichlet_zero") {
    out.left = out.right = BoundaryCondition::dirichlet(0.0, 0.0);
  } else {
    throw ConfigError("unknown bc '" + sc.bc + "'");
  }
  return out;
}

inline Trajectory run(const SimulationSetup& s) {
  return simulate(s.system, s.grid, s.left, s.right, s.init, s.scheme);
}

// Exact family sampled on a grid.
inline GridField sample_family(const std::string& id, const sym::Bindings& params, const GridSpec& grid,
                               double t0 = 0.0, double x0 = 0.0) {
  const SolutionEvaluator ev(id, params, t0, x0);
  GridField f(grid);
  for (int i = 0; i < grid.nt; ++i) {
    for (int j = 0; j < grid.nx; ++j) std::tie(f.u_at(i, j), f.v_at(i, j)) = ev.value(grid.t(i), grid.x(j));
  }
  return f;
}

// CSV with header `t,x,<u>,<v>`, row-major, every `stride`-th time slice
// (the last slice is always written).
inline void write_field_csv(std::ostream& out, const GridField& f, const std::string& u_name = "u",
                            const std::string& v_name = "v", int stride = 1) {
  out << "t,x," << u_name << ',' << v_name << '\n';
  char buf[128];
  const int nt = f.spec.nt;
  for (int i = 0; i < nt; ++i) {
    if (i % std::max(1, stride) != 0 && i != nt - 1) continue;
    for (int j = 0; j < f.spec.nx; ++j) {
      std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.12e\n", f.spec.t(i), f.spec.x(j), f.u_at(i, j),
                    f.v_at(i, j));
      out << buf;
    }
  }
}

// ---------------------------------------------------------------------------
// Reduced ODE integration

struct OdeTrajectory {
  std::vector<double> x;
  std::vector<ProfileState> state;
  bool blown_up = false;
  double last_valid_x = 0.0;
};

// Classical RK4 on (p1, p1', p2, p2') from x0 to x1 in n steps.
inline OdeTrajectory ode_integrate(const ReducedRhs& rhs, const ProfileState& ics, double x0, double x1, int n) {
  if (n < 1) throw std::invalid_argument("ode_integrate: n must be >= 1");
  const double h = (x1 - x0) / n;
  OdeTrajectory out;
  out.x.push_back(x0);
  out.state.push_back(ics);
  out.last_valid_x = x0;
  const auto f = [&](double x, const ProfileState& s) {
    const auto [a, b] = rhs(x, s);
    return ProfileState{s.d1, a, s.d2, b};
  };
  const auto axpy = [](const ProfileState& s, double c, const ProfileState& k) {
    return ProfileState{s.p1 + c * k.p1, s.d1 + c * k.d1, s.p2 + c * k.p2, s.d2 + c * k.d2};
  };
  ProfileState s = ics;
  for (int i = 0; i < n; ++i) {
    const double x = x0 + i * h;
    ProfileState k1, k2, k3, k4;
    try {
      k1 = f(x, s);
      k2 = f(x + h / 2, axpy(s, h / 2, k1));
      k3 = f(x + h / 2, axpy(s, h / 2, k2));
      k4 = f(x + h, axpy(s, h, k3));
    } catch (const sym::EvalError&) {
      out.blown_up = true;
      return out;
    }
    ProfileState next{s.p1 + h / 6 * (k1.p1 + 2 * k2.p1 + 2 * k3.p1 + k4.p1),
                      s.d1 + h / 6 * (k1.d1 + 2 * k2.d1 + 2 * k3.d1 + k4.d1),
                      s.p2 + h / 6 * (k1.p2 + 2 * k2.p2 + 2 * k3.p2 + k4.p2),
                      s.d2 + h / 6 * (k1.d2 + 2 * k2.d2 + 2 * k3.d2 + k4.d2)};
    for (double c : {next.p1, next.d1, next.p2, next.d2}) {
      if (!std::isfinite(c) || std::fabs(c) > kBlowUp) {
        out.blown_up = true;
        return out;
      }
    }
    s = next;
    const double xn = i + 1 == n ? x1 : x0 + (i + 1) * h;
    out.x.push_back(xn);
    out.state.push_back(s);
    out.last_valid_x = xn;
  }
  return out;
}

}  // namespace dlv

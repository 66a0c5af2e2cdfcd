#pragma once

// Exact solution catalog, ansatz rows with their reduced ODEs,
// and the particular profiles the exact solutions are assembled from.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlv/model.hpp"
#include "dlv/random.hpp"
#include "dlv/symbolic.hpp"
#include "dlv/symmetry.hpp"

namespace dlv {

class ConstraintError : public std::invalid_argument {
 public:
  ConstraintError(const std::string& what, std::vector<Violation> v)
      : std::invalid_argument(what), violations_(std::move(v)) {}
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

struct Constraint {
  std::string name;
  std::string detail;
  std::function<bool(const sym::Bindings&)> holds;
};

namespace detail {

inline double get(const sym::Bindings& b, const char* k) {
  const auto it = b.find(k);
  if (it == b.end()) throw std::out_of_range(std::string("missing parameter '") + k + "'");
  return it->second;
}

inline bool ratio_is(const sym::Bindings& b, double r) {
  const double l1 = get(b, "lambda1"), l2 = get(b, "lambda2");
  return std::fabs(l1 - r * l2) <= 1e-12 * (std::fabs(l1) + std::fabs(l2));
}

inline double beta_of(const sym::Bindings& b) {
  return beta(get(b, "a1"), get(b, "a2"), get(b, "lambda1"), get(b, "lambda2"));
}

inline std::vector<Violation> check_list(const std::vector<Constraint>& cs, const std::vector<std::string>& needed,
                                         const sym::Bindings& p) {
  std::vector<Violation> out;
  for (const auto& k : needed) {
    if (p.find(k) == p.end()) out.push_back({"missing parameter", k});
  }
  if (!out.empty()) return out;
  for (const auto& c : cs) {
    bool ok = false;
    try {
      ok = c.holds(p);
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok) out.push_back({c.name, c.detail});
  }
  return out;
}

inline Constraint c_lambda_distinct() {
  return {"lambda1 != lambda2", "lambda1 != lambda2",
          [](const sym::Bindings& b) { return get(b, "lambda1") != get(b, "lambda2"); }};
}
inline Constraint c_ratio(double r, const char* text) {
  return {"lambda-ratio", text, [r](const sym::Bindings& b) { return ratio_is(b, r); }};
}
inline Constraint c_gt(const char* lhs, const char* rhs) {
  std::string l = lhs, r = rhs;
  return {l + " > " + r, l + " > " + r, [l, r](const sym::Bindings& b) {
            const double rv = r == "0" ? 0.0 : get(b, r.c_str());
            return get(b, l.c_str()) > rv;
          }};
}
inline Constraint c_lt(const char* lhs, const char* rhs) {
  std::string l = lhs, r = rhs;
  return {l + " < " + r, l + " < " + r, [l, r](const sym::Bindings& b) {
            const double rv = r == "0" ? 0.0 : get(b, r.c_str());
            return get(b, l.c_str()) < rv;
          }};
}
inline Constraint c_beta(bool positive) {
  return {positive ? "beta > 0" : "beta < 0", positive ? "beta > 0, beta = (a1 - a2)/(lambda1 - lambda2)" : "beta < 0, beta = (a1 - a2)/(lambda1 - lambda2)", [positive](const sym::Bindings& b) {
            const double be = beta_of(b);
            return positive ? be > 0 : be < 0;
          }};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exact solution families

enum class FieldSemantics { UV, CompetitionUV };

// Poles at x = x0 + k * period (period 0: the single point x0).
struct Singularity {
  double x0 = 0.0;
  double period = 0.0;
};

struct Window {
  double t0 = 0.0, t1 = 1.0;
  double x0 = -1.0, x1 = 1.0;
};

struct SolutionFamily {
  std::string id;
  std::string host;                      // system name
  std::vector<std::string> family_params;  // beyond the host parameters
  std::vector<Constraint> constraints;
  std::string u_text, v_text;  // over t, x, parameters and derived names
  FieldSemantics semantics = FieldSemantics::UV;
  std::string singularity_text;
  OperatorId generator = OperatorId::op39;

  std::vector<std::string> required_params() const {
    std::vector<std::string> out = host == "sys38"   ? std::vector<std::string>{"lambda1", "lambda2", "a1", "a2"}
                                   : host == "sys43" ? std::vector<std::string>{"lambda1", "lambda2", "a"}
                                                     : std::vector<std::string>{"lambda1", "lambda2", "a1", "a2", "b", "c"};
    out.insert(out.end(), family_params.begin(), family_params.end());
    return out;
  }
};

namespace detail {

inline std::vector<SolutionFamily> build_catalog() {
  using detail::c_beta;
  using detail::c_gt;
  using detail::c_lambda_distinct;
  using detail::c_lt;
  using detail::c_ratio;
  std::vector<SolutionFamily> c;
  const auto ratio95 = [] { return c_ratio(1.8, "lambda1 = (9/5) lambda2"); };
  const auto ratio43 = [] { return c_ratio(4.0 / 3.0, "lambda1 = (4/3) lambda2"); };
  const std::string e95 = "exp(5*(a1 - a2)*t/(4*lambda2))";
  const std::string e43 = "exp(3*(a1 - a2)*t/lambda2)";

  c.push_back({"eq106", "sys38", {"C1", "C2"}, {c_lambda_distinct(), c_beta(true)},
               "-a1 + (C1*exp(k*x) + C2*exp(-k*x))*exp(beta*t)/(a2 - a1)",
               "(C1*exp(k*x) + C2*exp(-k*x))*exp(beta*t)/(a1 - a2)", FieldSemantics::UV, "none", OperatorId::op39});
  c.push_back({"eq107", "sys38", {"C1", "C2"}, {c_lambda_distinct(), c_beta(false)},
               "-a1 + (C1*cos(k*x) + C2*sin(k*x))*exp(beta*t)/(a2 - a1)",
               "(C1*cos(k*x) + C2*sin(k*x))*exp(beta*t)/(a1 - a2)", FieldSemantics::UV, "none", OperatorId::op39});
  c.push_back({"eq116", "sys38", {}, {ratio95(), c_gt("a1", "a2")},
               "a1/2 - 1.5*a1*tanh(m*x)^2 - cosh(m*x)^3*" + e95 + "/(a1 - a2)",
               "-1.5*a2*(1 - tanh(m*x)^2) + cosh(m*x)^3*" + e95 + "/(a1 - a2)", FieldSemantics::UV, "none",
               OperatorId::op39});
  c.push_back({"eq118", "sys38", {}, {ratio43(), c_gt("a1", "a2")},
               "a1/2 - 1.5*a1*tanh(m*x)^2 - sinh(m*x)*cosh(m*x)^3*" + e43 + "/(a1 - a2)",
               "-1.5*a2*(1 - tanh(m*x)^2) + sinh(m*x)*cosh(m*x)^3*" + e43 + "/(a1 - a2)", FieldSemantics::UV,
               "none", OperatorId::op39});
  c.push_back({"eq119", "sys38", {}, {ratio95(), c_gt("a1", "a2")},
               "a1/2 - 1.5*a1*coth(m*x)^2 - sinh(m*x)^3*" + e95 + "/(a1 - a2)",
               "-1.5*a2*(1 - coth(m*x)^2) + sinh(m*x)^3*" + e95 + "/(a1 - a2)", FieldSemantics::UV, "x = 0",
               OperatorId::op39});
  c.push_back({"eq120", "sys38", {}, {ratio43(), c_gt("a1", "a2")},
               "a1/2 - 1.5*a1*coth(m*x)^2 - cosh(m*x)*sinh(m*x)^3*" + e43 + "/(a1 - a2)",
               "-1.5*a2*(1 - coth(m*x)^2) + cosh(m*x)*sinh(m*x)^3*" + e43 + "/(a1 - a2)", FieldSemantics::UV,
               "x = 0", OperatorId::op39});
  c.push_back({"eq121", "sys38", {}, {ratio95(), c_lt("a1", "a2")},
               "a1/2 + 1.5*a1*tan(n*x)^2 - cos(n*x)^3*" + e95 + "/(a1 - a2)",
               "-1.5*a2*(1 + tan(n*x)^2) + cos(n*x)^3*" + e95 + "/(a1 - a2)", FieldSemantics::UV,
               "x = (pi/2 + j pi)/n", OperatorId::op39});
  c.push_back({"eq127", "sys43", {"alpha"}, {c_lambda_distinct(), c_lt("a", "0")},
               "alpha*a*lambda1*lambda2*(-0.5 + 1.5*tanh(m*x)^2)*exp(a*t)",
               "-1.5*a*lambda2*(1 - tanh(m*x)^2) - alpha*a*lambda1*lambda2*(-0.5 + 1.5*tanh(m*x)^2)*exp(a*t)",
               FieldSemantics::UV, "none", OperatorId::op44});
  c.push_back({"eq128", "sys43", {"alpha"}, {c_lambda_distinct(), c_lt("a", "0")},
               "alpha*a*lambda1*lambda2*(-0.5 + 1.5*coth(m*x)^2)*exp(a*t)",
               "-1.5*a*lambda2*(1 - coth(m*x)^2) - alpha*a*lambda1*lambda2*(-0.5 + 1.5*coth(m*x)^2)*exp(a*t)",
               FieldSemantics::UV, "x = 0", OperatorId::op44});
  c.push_back({"eq129", "sys43", {"alpha"}, {c_lambda_distinct(), c_gt("a", "0")},
               "-alpha*a*lambda1*lambda2*(0.5 + 1.5*tan(n*x)^2)*exp(a*t)",
               "-1.5*a*lambda2*(1 + tan(n*x)^2) + alpha*a*lambda1*lambda2*(0.5 + 1.5*tan(n*x)^2)*exp(a*t)",
               FieldSemantics::UV, "x = (pi/2 + j pi)/n", OperatorId::op44});
  c.push_back({"eq134", "sys136", {"C2"},
               {c_lambda_distinct(), c_beta(false), c_gt("a1", "0"), c_gt("a2", "0"), c_gt("b", "0"), c_gt("c", "0")},
               "a1/b + C2*sin(k*x)*exp(beta*t)/((a1 - a2)*b)", "C2*sin(k*x)*exp(beta*t)/((a2 - a1)*c)",
               FieldSemantics::CompetitionUV, "none", OperatorId::opT3_2});
  return c;
}

}  // namespace detail

inline const std::vector<SolutionFamily>& catalog() {
  static const std::vector<SolutionFamily> c = detail::build_catalog();
  return c;
}

inline const SolutionFamily& find_family(const std::string& id) {
  for (const auto& f : catalog()) {
    if (f.id == id) return f;
  }
  throw std::invalid_argument("unknown solution family '" + id + "'");
}

// Names the formulas use beyond the raw parameters.
inline sym::Bindings derived_bindings(const SolutionFamily& f, const sym::Bindings& p) {
  using detail::get;
  sym::Bindings d;
  if (f.id == "eq106") {
    d["beta"] = detail::beta_of(p);
    d["k"] = std::sqrt(d["beta"] * get(p, "lambda1"));
  } else if (f.id == "eq107" || f.id == "eq134") {
    d["beta"] = detail::beta_of(p);
    d["k"] = std::sqrt(-d["beta"] * get(p, "lambda1"));
  } else if (f.id == "eq116" || f.id == "eq118" || f.id == "eq119" || f.id == "eq120") {
    d["m"] = 0.5 * std::sqrt(get(p, "a1") - get(p, "a2"));
  } else if (f.id == "eq121") {
    d["n"] = 0.5 * std::sqrt(get(p, "a2") - get(p, "a1"));
  } else if (f.id == "eq127" || f.id == "eq128") {
    d["m"] = 0.5 * std::sqrt(-get(p, "a") * get(p, "lambda2"));
  } else if (f.id == "eq129") {
    d["n"] = 0.5 * std::sqrt(get(p, "a") * get(p, "lambda2"));
  }
  return d;
}

inline std::vector<Singularity> singular_loci(const SolutionFamily& f, const sym::Bindings& p) {
  if (f.singularity_text == "x = 0") return {{0.0, 0.0}};
  if (f.singularity_text.rfind("x = (pi/2", 0) == 0) {
    const double n = derived_bindings(f, p).at("n");
    return {{std::numbers::pi / (2 * n), std::numbers::pi / n}};
  }
  return {};
}

// Distance from x to the nearest singular locus (infinity if none).
inline double distance_to_singularity(const std::vector<Singularity>& loci, double x) {
  double best = INFINITY;
  for (const auto& s : loci) {
    if (s.period == 0.0) {
      best = std::min(best, std::fabs(x - s.x0));
    } else {
      const double r = std::remainder(x - s.x0, s.period);
      best = std::min(best, std::fabs(r));
    }
  }
  return best;
}

struct ConstraintReport {
  std::vector<Violation> violations;
  std::vector<Singularity> singularities;
  bool ok() const { return violations.empty(); }
};

inline ConstraintReport check_constraints(const std::string& id, const sym::Bindings& params) {
  const SolutionFamily& f = find_family(id);
  ConstraintReport r;
  r.violations = detail::check_list(f.constraints, f.required_params(), params);
  if (r.ok()) r.singularities = singular_loci(f, params);
  return r;
}

inline void require_constraints(const std::string& what, const std::vector<Violation>& v) {
  if (v.empty()) return;
  std::string msg = what + ":";
  for (const auto& x : v) msg += " " + x.name + (x.name == "missing parameter" ? " " + x.detail : "") + ";";
  throw ConstraintError(msg, v);
}

// Window well inside the family's validity region, away from poles.
inline Window default_window(const std::string& id, const sym::Bindings& p) {
  const SolutionFamily& f = find_family(id);
  if (f.singularity_text == "x = 0") return {0.0, 0.5, 0.3, 2.0};
  if (f.singularity_text.rfind("x = (pi/2", 0) == 0) {
    const double edge = 0.8 * std::numbers::pi / (2 * derived_bindings(f, p).at("n"));
    const double half = std::min(edge, 2.0);
    return {0.0, 0.5, -half, half};
  }
  return {0.0, 0.5, -1.0, 1.0};
}

// The family's system, built from the same parameter map.
inline SystemId family_system(const std::string& id, const sym::Bindings& p) {
  return make_system(find_family(id).host, p);
}

struct SolutionExprs {
  sym::Expr u, v;
};

// Closed forms over (t, x) with every parameter bound. (t0, x0) translate
// the solution: the result is the family evaluated at (t - t0, x - x0).
inline SolutionExprs family_exprs(const std::string& id, const sym::Bindings& params, double t0 = 0.0,
                                  double x0 = 0.0) {
  const SolutionFamily& f = find_family(id);
  require_constraints(id, detail::check_list(f.constraints, f.required_params(), params));
  sym::Bindings all = params;
  for (const auto& [k, v] : derived_bindings(f, params)) all[k] = v;
  std::map<std::string, sym::Expr, std::less<>> repl;
  for (const auto& [k, v] : all) repl.emplace(k, sym::Expr(v));
  repl.insert_or_assign("t", sym::var("t") - sym::Expr(t0));
  repl.insert_or_assign("x", sym::var("x") - sym::Expr(x0));
  const sym::Expr u = sym::substitute(sym::parse_expr(f.u_text), repl);
  const sym::Expr v = sym::substitute(sym::parse_expr(f.v_text), repl);
  for (const auto* e : {&u, &v}) {
    for (const auto& name : e->variables()) {
      if (name != "t" && name != "x") throw std::invalid_argument(id + ": unbound name '" + name + "'");
    }
  }
  return {u, v};
}

// Compiled values and analytic derivatives of one family instance.
class SolutionEvaluator {
 public:
  SolutionEvaluator(const std::string& id, const sym::Bindings& params, double t0 = 0.0, double x0 = 0.0)
      : exprs_(family_exprs(id, params, t0, x0)) {
    const std::vector<std::string> slots{"t", "x"};
    const auto& [u, v] = exprs_;
    const sym::Expr* es[8] = {&u, &v, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr};
    const sym::Expr ut = sym::diff(u, "t"), vt = sym::diff(v, "t");
    const sym::Expr ux = sym::diff(u, "x"), vx = sym::diff(v, "x");
    const sym::Expr uxx = sym::diff(ux, "x"), vxx = sym::diff(vx, "x");
    es[2] = &ut;
    es[3] = &vt;
    es[4] = &ux;
    es[5] = &vx;
    es[6] = &uxx;
    es[7] = &vxx;
    for (int k = 0; k < 8; ++k) programs_[k] = sym::Compiled(*es[k], slots);
  }

  std::pair<double, double> value(double t, double x) const {
    const double at[2] = {t, x};
    return {programs_[0](at), programs_[1](at)};
  }

  FieldJet jet(double t, double x) const {
    const double at[2] = {t, x};
    FieldJet j;
    j.u = programs_[0](at);
    j.v = programs_[1](at);
    j.u_t = programs_[2](at);
    j.v_t = programs_[3](at);
    j.u_x = programs_[4](at);
    j.v_x = programs_[5](at);
    j.u_xx = programs_[6](at);
    j.v_xx = programs_[7](at);
    return j;
  }

  const SolutionExprs& exprs() const { return exprs_; }

 private:
  SolutionExprs exprs_;
  sym::Compiled programs_[8];
};

inline std::pair<double, double> eval_solution(const std::string& id, const sym::Bindings& params, double t, double x,
                                               double t0 = 0.0, double x0 = 0.0) {
  return SolutionEvaluator(id, params, t0, x0).value(t, x);
}

inline FieldJet solution_derivatives(const std::string& id, const sym::Bindings& params, double t, double x,
                                     double t0 = 0.0, double x0 = 0.0) {
  return SolutionEvaluator(id, params, t0, x0).jet(t, x);
}

// The operator under which a family is invariant, built from the same
// parameters.
inline OperatorSpec generating_operator(const std::string& id, const sym::Bindings& params) {
  const SolutionFamily& f = find_family(id);
  OperatorSpec s;
  s.id = f.generator;
  s.host = family_system(id, params);
  if (f.generator == OperatorId::op44) s.k.alpha = detail::get(params, "alpha");
  return s;
}

// Random parameters satisfying the family's constraints, with magnitudes
// kept moderate so that the default window stays well conditioned.
inline sym::Bindings random_family_params(const std::string& id, Rng& rng) {
  const auto sgn = [&] { return rng.uniform() < 0.5 ? -1.0 : 1.0; };
  sym::Bindings p;
  const auto lambdas = [&](double ratio) {
    p["lambda2"] = rng.uniform(1.0, 2.0);
    p["lambda1"] = ratio * p["lambda2"];
  };
  if (id == "eq106" || id == "eq107" || id == "eq134") {
    // beta sign is fixed by the ordering of lambda1 - lambda2 against a1 - a2
    const bool positive = id == "eq106";
    p["lambda1"] = rng.uniform(1.0, 3.0);
    p["lambda2"] = p["lambda1"] + sgn() * rng.uniform(0.5, 1.0);
    if (p["lambda2"] <= 0.2) p["lambda2"] = p["lambda1"] + rng.uniform(0.5, 1.0);
    const double d = rng.uniform(0.5, 1.5) * ((p["lambda1"] > p["lambda2"]) == positive ? 1.0 : -1.0);
    if (id == "eq134") {
      p["a2"] = rng.uniform(0.5, 1.5);
      p["a1"] = std::max(0.2, p["a2"] + d);
      p["a2"] = p["a1"] - d;
      if (p["a2"] <= 0) {
        p["a2"] = 0.3;
        p["a1"] = p["a2"] + d;
      }
      p["b"] = rng.uniform(0.05, 1.0);
      p["c"] = rng.uniform(0.05, 1.0);
      p["C2"] = sgn() * rng.uniform(0.1, 1.0);
    } else {
      p["a2"] = rng.uniform(-1.5, 1.5);
      p["a1"] = p["a2"] + d;
      p["C1"] = sgn() * rng.uniform(0.1, 1.0);
      p["C2"] = sgn() * rng.uniform(0.1, 1.0);
    }
  } else if (id == "eq116" || id == "eq119" || id == "eq121") {
    lambdas(1.8);
    p["a2"] = rng.uniform(-1.0, 1.0);
    p["a1"] = p["a2"] + (id == "eq121" ? -1.0 : 1.0) * rng.uniform(0.5, 1.5);
  } else if (id == "eq118" || id == "eq120") {
    lambdas(4.0 / 3.0);
    p["a2"] = rng.uniform(-1.0, 1.0);
    p["a1"] = p["a2"] + rng.uniform(0.3, 0.8);
  } else if (id == "eq127" || id == "eq128" || id == "eq129") {
    p["lambda1"] = rng.uniform(0.5, 2.0);
    p["lambda2"] = p["lambda1"] + sgn() * rng.uniform(0.3, 0.8);
    if (p["lambda2"] <= 0.2) p["lambda2"] = p["lambda1"] + 0.5;
    p["a"] = (id == "eq129" ? 1.0 : -1.0) * rng.uniform(0.3, 1.5);
    p["alpha"] = sgn() * rng.uniform(0.3, 1.5);
  } else {
    throw std::invalid_argument("unknown solution family '" + id + "'");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Particular profiles

enum class PhiKind {
  phi111,    // tanh profile, a1 > a2
  phi112,    // coth profile, a1 > a2
  phi113,    // tan profile, a1 < a2
  phi115,    // cosh^3 companion of phi111, lambda1 = (9/5) lambda2
  phi117,    // sinh cosh^3 companion of phi111, lambda1 = (4/3) lambda2
  phi115c,   // sinh^3 companion of phi112, (9/5)
  phi117c,   // cosh sinh^3 companion of phi112, (4/3)
  phi115t,   // cos^3 companion of phi113, (9/5)
  phi122,    // tanh profile of the (a, lambda2) equation, a < 0
  phi122c,   // coth version, a < 0
  phi122t,   // tan version, a > 0
};

inline constexpr std::array<PhiKind, 11> kAllPhi = {PhiKind::phi111,  PhiKind::phi112,  PhiKind::phi113,
                                                    PhiKind::phi115,  PhiKind::phi117,  PhiKind::phi115c,
                                                    PhiKind::phi117c, PhiKind::phi115t, PhiKind::phi122,
                                                    PhiKind::phi122c, PhiKind::phi122t};

inline const char* phi_name(PhiKind k) {
  static const char* names[] = {"phi111",  "phi112",  "phi113",  "phi115", "phi117", "phi115c",
                                "phi117c", "phi115t", "phi122", "phi122c", "phi122t"};
  return names[static_cast<int>(k)];
}

inline PhiKind parse_phi_kind(const std::string& s) {
  for (const auto k : kAllPhi) {
    if (s == phi_name(k)) return k;
  }
  throw std::invalid_argument("unknown profile '" + s + "'");
}

namespace detail {

struct PhiInfo {
  std::string text;
  std::vector<std::string> needed;
  std::vector<Constraint> validity;
};

inline PhiInfo phi_info(PhiKind k) {
  const std::vector<std::string> a12{"a1", "a2"};
  const std::vector<std::string> a12l{"a1", "a2", "lambda1", "lambda2"};
  const std::vector<std::string> al{"a", "lambda2"};
  const std::string m = "(0.5*sqrt(a1 - a2)*x)";
  const std::string n = "(0.5*sqrt(a2 - a1)*x)";
  const std::string mm = "(0.5*sqrt(-a*lambda2)*x)";
  const std::string nn = "(0.5*sqrt(a*lambda2)*x)";
  switch (k) {
    case PhiKind::phi111: return {"1.5*(a1 - a2)*(1 - tanh" + m + "^2)", a12, {c_gt("a1", "a2")}};
    case PhiKind::phi112: return {"1.5*(a1 - a2)*(1 - coth" + m + "^2)", a12, {c_gt("a1", "a2")}};
    case PhiKind::phi113: return {"1.5*(a1 - a2)*(1 + tan" + n + "^2)", a12, {c_lt("a1", "a2")}};
    case PhiKind::phi115:
      return {"cosh" + m + "^3", a12l, {c_gt("a1", "a2"), c_ratio(1.8, "lambda1 = (9/5) lambda2")}};
    case PhiKind::phi117:
      return {"sinh" + m + "*cosh" + m + "^3", a12l, {c_gt("a1", "a2"), c_ratio(4.0 / 3.0, "lambda1 = (4/3) lambda2")}};
    case PhiKind::phi115c:
      return {"sinh" + m + "^3", a12l, {c_gt("a1", "a2"), c_ratio(1.8, "lambda1 = (9/5) lambda2")}};
    case PhiKind::phi117c:
      return {"cosh" + m + "*sinh" + m + "^3", a12l,
              {c_gt("a1", "a2"), c_ratio(4.0 / 3.0, "lambda1 = (4/3) lambda2")}};
    case PhiKind::phi115t:
      return {"cos" + n + "^3", a12l, {c_lt("a1", "a2"), c_ratio(1.8, "lambda1 = (9/5) lambda2")}};
    case PhiKind::phi122: return {"-1.5*a*lambda2*(1 - tanh" + mm + "^2)", al, {c_lt("a", "0")}};
    case PhiKind::phi122c: return {"-1.5*a*lambda2*(1 - coth" + mm + "^2)", al, {c_lt("a", "0")}};
    case PhiKind::phi122t: return {"-1.5*a*lambda2*(1 + tan" + nn + "^2)", al, {c_gt("a", "0")}};
  }
  return {};
}

}  // namespace detail

inline std::vector<Violation> phi_violations(PhiKind k, const sym::Bindings& p) {
  const auto info = detail::phi_info(k);
  return detail::check_list(info.validity, info.needed, p);
}

// Profile as an expression in x.
inline sym::Expr particular_phi_expr(PhiKind k, const sym::Bindings& p) {
  require_constraints(phi_name(k), phi_violations(k, p));
  return sym::substitute(sym::parse_expr(detail::phi_info(k).text), p);
}

inline double particular_phi(PhiKind k, const sym::Bindings& p, double x) {
  return sym::eval_expr(particular_phi_expr(k, p), {{"x", x}});
}

// The profile that a companion solves against, shifted to the ansatz's
// first function (phi1 = phi - a1).
inline std::optional<PhiKind> phi_partner(PhiKind k) {
  switch (k) {
    case PhiKind::phi115:
    case PhiKind::phi117: return PhiKind::phi111;
    case PhiKind::phi115c:
    case PhiKind::phi117c: return PhiKind::phi112;
    case PhiKind::phi115t: return PhiKind::phi113;
    default: return std::nullopt;
  }
}

// Residual of the ODE the profile is meant to satisfy, as an expression in x.
//  phi111..113: phi'' + phi^2 + (a2 - a1) phi
//  companions:  phi2'' + ((a2 l1 - a1 l2)/(l1 - l2) + phi - a1) phi2
//  phi122*:     phi1'' + phi1^2 + a l2 phi1
inline sym::Expr phi_defining_ode(PhiKind k, const sym::Bindings& p) {
  using sym::Expr;
  const Expr f = particular_phi_expr(k, p);
  const Expr f2 = sym::diff(f, "x", 2);
  if (k == PhiKind::phi111 || k == PhiKind::phi112 || k == PhiKind::phi113) {
    return f2 + sym::pow(f, 2.0) + Expr(detail::get(p, "a2") - detail::get(p, "a1")) * f;
  }
  if (k == PhiKind::phi122 || k == PhiKind::phi122c || k == PhiKind::phi122t) {
    return f2 + sym::pow(f, 2.0) + Expr(detail::get(p, "a") * detail::get(p, "lambda2")) * f;
  }
  const double a1 = detail::get(p, "a1"), a2 = detail::get(p, "a2");
  const double l1 = detail::get(p, "lambda1"), l2 = detail::get(p, "lambda2");
  const Expr phi = particular_phi_expr(*phi_partner(k), p);
  return f2 + (Expr((a2 * l1 - a1 * l2) / (l1 - l2)) + phi - Expr(a1)) * f;
}

// First integral with zero constant: (phi')^2 + (2/3) phi^3 - (a1 - a2) phi^2.
inline std::optional<sym::Expr> phi_first_integral(PhiKind k, const sym::Bindings& p) {
  using sym::Expr;
  if (k != PhiKind::phi111 && k != PhiKind::phi112 && k != PhiKind::phi113) return std::nullopt;
  const Expr f = particular_phi_expr(k, p);
  return sym::pow(sym::diff(f, "x"), 2.0) + Expr(2.0 / 3.0) * sym::pow(f, 3.0) -
         Expr(detail::get(p, "a1") - detail::get(p, "a2")) * sym::pow(f, 2.0);
}

// ---------------------------------------------------------------------------
// Ansatz rows
//
// Each row writes u = A0 + A1 phi1(w) + A2 phi2(w), likewise v, with
// w = x - s t, and reduces the system to phi1'' = f1, phi2'' = f2 where f1, f2
// are expressions in w, f1, df1, f2, df2 (profile values and first
// derivatives, named "p1", "d1", "p2", "d2").

struct AnsatzRow {
  int number = 2;
  OperatorId op = OperatorId::op39;
  std::string host;
  std::vector<std::string> row_params;  // beyond the host parameters
  std::vector<Constraint> constraints;
  std::string speed;                    // s in w = x - s t
  std::array<std::string, 3> u_coeff;   // A0, A1, A2 over t, x
  std::array<std::string, 3> v_coeff;
  std::string rhs1, rhs2;               // over p1, d1, p2, d2
};

namespace detail {

inline std::vector<AnsatzRow> build_rows() {
  const std::string E = "exp((a1 - a2)*t/(lambda1 - lambda2))";
  const std::string L = "(lambda1 - lambda2)";
  const std::string phi2_rhs = "-((a2*lambda1 - a1*lambda2)/(lambda1 - lambda2)*p2 + p1*p2)";
  const auto a_ne = Constraint{"a != 0", "a must be nonzero", [](const sym::Bindings& b) { return get(b, "a") != 0; }};
  const auto a12 = Constraint{"a1 != a2", "a1 must differ from a2",
                              [](const sym::Bindings& b) { return get(b, "a1") != get(b, "a2"); }};
  std::vector<AnsatzRow> r;
  // w = x - C1 t; Atilde is the constant A of the row's exponent.
  const std::string ex = "exp((lambda1 - lambda2)/2*C1*(x - C1*t) + Atilde*t)";
  r.push_back({1, OperatorId::op37, "sys36", {"C1", "C2", "C3", "C4"}, {c_lambda_distinct()}, "C1",
               {"0", "1", "0"},
               {ex + "*a1*C4*exp(a1*t/lambda2)", ex + "*(C3 + C4*exp(a1*t/lambda2))", "exp(C2*t)"},
               "-C1*lambda1*d1 - (a1 + p1)*p1", "-C1*lambda2*d2 - p2*(p1 - C2*lambda2)"});
  r.push_back({2, OperatorId::op39, "sys38", {}, {c_lambda_distinct(), a12}, "0",
               {"a1*a2/(a1 - a2)", "a1/(a1 - a2)", "-" + E + "/(a1 - a2)"},
               {"-a1*a2/(a1 - a2)", "-a2/(a1 - a2)", E + "/(a1 - a2)"},
               "-(p1^2 + (a1 + a2)*p1 + a1*a2)", phi2_rhs});
  r.push_back({3, OperatorId::op40, "sys38", {}, {c_lambda_distinct(), a12}, "0", {"0", "0", E}, {"0", "1", "-" + E},
               "-(p1^2 + a2*p1)", phi2_rhs});
  r.push_back({4, OperatorId::op40s, "sys38", {}, {c_lambda_distinct(), a12}, "0", {"0", "1", "-" + E}, {"0", "0", E},
               "-(p1^2 + a1*p1)", phi2_rhs});
  r.push_back({5, OperatorId::op39a, "sys41", {}, {c_lambda_distinct(), a_ne}, "0",
               {"-a^2*t/" + L, "1 - a*t/" + L, "-1"}, {"a^2*t/" + L, "a*t/" + L, "1"}, "-(a + p1)^2",
               "-(p2 - a*lambda2/" + L + ")*(a + p1)"});
  r.push_back({6, OperatorId::op42, "sys41", {}, {c_lambda_distinct()}, "0", {"0", "lambda1/" + L, "-t/" + L},
               {"0", "-lambda2/" + L, "t/" + L}, "-(p2 + p1*(a + p1))", "-p2*(a + p1)"});
  r.push_back({7, OperatorId::op39b, "sys43", {}, {c_lambda_distinct(), a_ne}, "0",
               {"a*lambda1*lambda2/" + L, "lambda1/" + L, "-exp(a*t)/(a*" + L + ")"},
               {"-a*lambda1*lambda2/" + L, "-lambda2/" + L, "exp(a*t)/(a*" + L + ")"},
               "-(p1^2 + a*(lambda1 + lambda2)*p1 + a^2*lambda1*lambda2)", "-p1*p2"});
  r.push_back({8, OperatorId::op40a, "sys43", {}, {a_ne}, "0", {"0", "0", "exp(a*t)"}, {"0", "1", "-exp(a*t)"},
               "-(p1^2 + a*lambda2*p1)", "-p1*p2"});
  r.push_back({9, OperatorId::op40b, "sys43", {}, {a_ne}, "0", {"0", "1", "-exp(a*t)"}, {"0", "0", "exp(a*t)"},
               "-(p1^2 + a*lambda1*p1)", "-p1*p2"});
  r.push_back({10, OperatorId::op44, "sys43", {"alpha"}, {c_lambda_distinct(), a_ne}, "0",
               {"a*lambda1*lambda2/" + L, "lambda1/" + L, "-(1 - alpha*" + L + "*exp(a*t))/" + L},
               {"-a*lambda1*lambda2/" + L, "-lambda2/" + L, "(1 - alpha*" + L + "*exp(a*t))/" + L},
               "-(p1^2 - a*p2 + a*(lambda1 + lambda2)*p1 + a^2*lambda1*lambda2)", "-p1*p2"});
  return r;
}

}  // namespace detail

inline const std::vector<AnsatzRow>& ansatz_rows() {
  static const std::vector<AnsatzRow> r = detail::build_rows();
  return r;
}

// Accepts "row2", "2", and the aliases "ansatz95" (row 2), "ansatz96" (row 5).
inline const AnsatzRow& find_row(const std::string& id) {
  int n = 0;
  if (id == "ansatz95") {
    n = 2;
  } else if (id == "ansatz96") {
    n = 5;
  } else {
    const std::string digits = id.rfind("row", 0) == 0 ? id.substr(3) : id;
    try {
      std::size_t used = 0;
      n = std::stoi(digits, &used);
      if (used != digits.size()) n = 0;
    } catch (const std::exception&) {
      n = 0;
    }
  }
  if (n < 1 || n > 10) throw std::invalid_argument("unknown ansatz row '" + id + "'");
  return ansatz_rows()[n - 1];
}

inline std::vector<std::string> row_required(const AnsatzRow& r) {
  std::vector<std::string> out = r.host == "sys36"   ? std::vector<std::string>{"lambda1", "lambda2", "a1"}
                                 : r.host == "sys38" ? std::vector<std::string>{"lambda1", "lambda2", "a1", "a2"}
                                                     : std::vector<std::string>{"lambda1", "lambda2", "a"};
  out.insert(out.end(), r.row_params.begin(), r.row_params.end());
  return out;
}

inline std::vector<Violation> row_violations(const AnsatzRow& r, const sym::Bindings& p) {
  return detail::check_list(r.constraints, row_required(r), p);
}

// The row-1 exponent constant ((l1^2 - l2^2)/(4 l2)) C1^2 - a1/l2.
inline double row1_A(const sym::Bindings& p) {
  using detail::get;
  const double l1 = get(p, "lambda1"), l2 = get(p, "lambda2"), c1 = get(p, "C1");
  return (l1 * l1 - l2 * l2) / (4 * l2) * c1 * c1 - get(p, "a1") / l2;
}

// Row data with every parameter bound: coefficient expressions over (t, x),
// right-hand sides over (w, p1, d1, p2, d2), and the wave speed.
struct BoundRow {
  const AnsatzRow* row = nullptr;
  SystemId system;
  double speed = 0.0;
  std::array<sym::Expr, 3> u_coeff, v_coeff;
  sym::Expr rhs1, rhs2;
};

inline BoundRow bind_row(const AnsatzRow& r, const sym::Bindings& params) {
  require_constraints("row" + std::to_string(r.number), row_violations(r, params));
  sym::Bindings all = params;
  if (r.number == 1) all["Atilde"] = row1_A(params);
  const auto bind = [&](const std::string& text) { return sym::substitute(sym::parse_expr(text), all); };
  BoundRow b;
  b.row = &r;
  b.system = make_system(r.host, params);
  b.speed = sym::eval_expr(bind(r.speed), {});
  for (int k = 0; k < 3; ++k) {
    b.u_coeff[k] = bind(r.u_coeff[k]);
    b.v_coeff[k] = bind(r.v_coeff[k]);
  }
  b.rhs1 = bind(r.rhs1);
  b.rhs2 = bind(r.rhs2);
  return b;
}

using Profile = std::function<double(double)>;

// (u, v) of the ansatz for given profile functions.
inline std::pair<double, double> build_ansatz(const BoundRow& b, const Profile& phi1, const Profile& phi2, double t,
                                              double x) {
  const double w = x - b.speed * t;
  const double f1 = phi1(w), f2 = phi2(w);
  const sym::Bindings at{{"t", t}, {"x", x}};
  const auto comb = [&](const std::array<sym::Expr, 3>& c) {
    return sym::eval_expr(c[0], at) + sym::eval_expr(c[1], at) * f1 + sym::eval_expr(c[2], at) * f2;
  };
  return {comb(b.u_coeff), comb(b.v_coeff)};
}

inline std::pair<double, double> build_ansatz(const std::string& row, const sym::Bindings& params,
                                              const Profile& phi1, const Profile& phi2, double t, double x) {
  return build_ansatz(bind_row(find_row(row), params), phi1, phi2, t, x);
}

struct ProfileState {
  double p1 = 0.0, d1 = 0.0, p2 = 0.0, d2 = 0.0;
};

using ReducedRhs = std::function<std::pair<double, double>(double w, const ProfileState&)>;

// (phi1'', phi2'') as a function of the profile state.
inline ReducedRhs reduced_rhs(const BoundRow& b) {
  const std::vector<std::string> slots{"w", "p1", "d1", "p2", "d2"};
  auto f1 = std::make_shared<sym::Compiled>(b.rhs1, slots);
  auto f2 = std::make_shared<sym::Compiled>(b.rhs2, slots);
  return [f1, f2](double w, const ProfileState& s) {
    const double at[5] = {w, s.p1, s.d1, s.p2, s.d2};
    return std::pair<double, double>{(*f1)(at), (*f2)(at)};
  };
}

inline ReducedRhs reduced_rhs(const std::string& row, const sym::Bindings& params) {
  return reduced_rhs(bind_row(find_row(row), params));
}

// PDE residuals of the ansatz with profile values and first derivatives left
// free and second derivatives taken from the reduced system. Expressions over
// (t, x, p1, d1, p2, d2); they vanish identically when the reduction is right.
// With free_second the second derivatives stay free as well (names q1, q2).
inline std::pair<sym::Expr, sym::Expr> reduction_residual_exprs(const BoundRow& b, bool free_second = false) {
  using sym::Expr;
  const DlvParams p = expand(b.system);
  const Expr p1 = sym::var("p1"), d1 = sym::var("d1"), p2 = sym::var("p2"), d2 = sym::var("d2");
  const Expr w = sym::var("x") - Expr(b.speed) * sym::var("t");
  const Expr dd1 = free_second ? sym::var("q1") : sym::substitute(b.rhs1, std::map<std::string, Expr, std::less<>>{{"w", w}});
  const Expr dd2 = free_second ? sym::var("q2") : sym::substitute(b.rhs2, std::map<std::string, Expr, std::less<>>{{"w", w}});
  const Expr s(b.speed);
  const auto field = [&](const std::array<Expr, 3>& A) {
    const auto d = [](const Expr& e, const char* v) { return sym::diff(e, v); };
    const Expr val = A[0] + A[1] * p1 + A[2] * p2;
    const Expr t_der = d(A[0], "t") + d(A[1], "t") * p1 + d(A[2], "t") * p2 - s * (A[1] * d1 + A[2] * d2);
    const Expr xx_der = sym::diff(A[0], "x", 2) + sym::diff(A[1], "x", 2) * p1 + sym::diff(A[2], "x", 2) * p2 +
                        Expr(2.0) * (d(A[1], "x") * d1 + d(A[2], "x") * d2) + A[1] * dd1 + A[2] * dd2;
    return std::array<Expr, 3>{val, t_der, xx_der};
  };
  const auto U = field(b.u_coeff);
  const auto V = field(b.v_coeff);
  const Expr F = U[0] * (Expr(p.a1) + Expr(p.b1) * U[0] + Expr(p.c1) * V[0]);
  const Expr G = V[0] * (Expr(p.a2) + Expr(p.b2) * U[0] + Expr(p.c2) * V[0]);
  return {Expr(p.lambda1) * U[1] - U[2] - F, Expr(p.lambda2) * V[1] - V[2] - G};
}

}  // namespace dlv

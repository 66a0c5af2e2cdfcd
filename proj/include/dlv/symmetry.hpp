#pragma once

// Q-conditional symmetry operators of the DLV system and the determining
// equations they must satisfy.
//
// Operators are kept normalised to a unit d/dt coefficient:
//   Q = d_t + xi d_x + eta1 d_u + eta2 d_v,
//   eta1 = q1 v + r1 u + p1,  eta2 = q2 u + r2 v + p2   (linear form)

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlv/model.hpp"
#include "dlv/random.hpp"
#include "dlv/symbolic.hpp"

namespace dlv {

class OperatorConstraintError : public std::invalid_argument {
 public:
  OperatorConstraintError(const std::string& what, std::vector<std::string> violations)
      : std::invalid_argument(what), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Coefficients in (t, x) only.
struct LinearOperator {
  sym::Expr xi, q1, q2, r1, r2, p1, p2;

  sym::Expr eta1() const { return q1 * sym::var("v") + r1 * sym::var("u") + p1; }
  sym::Expr eta2() const { return q2 * sym::var("u") + r2 * sym::var("v") + p2; }
};

// Q = xi0 d_t + xi1 d_x + eta1 d_u + eta2 d_v with coefficients in (t,x,u,v).
struct GeneralOperator {
  sym::Expr xi0 = sym::Expr(1.0);
  sym::Expr xi1, eta1, eta2;

  // Divides through by xi0.
  GeneralOperator normalised() const {
    if (xi0.is_constant(1.0)) return *this;
    if (xi0.is_constant(0.0)) throw std::invalid_argument("operator has zero d/dt coefficient");
    return {sym::Expr(1.0), xi1 / xi0, eta1 / xi0, eta2 / xi0};
  }
};

inline GeneralOperator lift(const LinearOperator& op) { return {sym::Expr(1.0), op.xi, op.eta1(), op.eta2()}; }

// ---------------------------------------------------------------------------
// Operator catalog

enum class OperatorId { op37, op39, op40, op40s, op39a, op42, op39b, op40a, op40b, op44, opT3_1, opT3_2, opT3_3 };

inline constexpr std::array<OperatorId, 13> kAllOperators = {
    OperatorId::op37,  OperatorId::op39,  OperatorId::op40,   OperatorId::op40s,  OperatorId::op39a,
    OperatorId::op42,  OperatorId::op39b, OperatorId::op40a,  OperatorId::op40b,  OperatorId::op44,
    OperatorId::opT3_1, OperatorId::opT3_2, OperatorId::opT3_3};

inline const char* operator_name(OperatorId id) {
  static const char* names[] = {"op37",  "op39",  "op40",  "op40s", "op39a",  "op42",  "op39b",
                                "op40a", "op40b", "op44",  "opT3_1", "opT3_2", "opT3_3"};
  return names[static_cast<int>(id)];
}

inline OperatorId parse_operator_id(const std::string& name) {
  for (const auto id : kAllOperators) {
    if (name == operator_name(id)) return id;
  }
  throw std::invalid_argument("unknown operator '" + name + "'");
}

inline bool is_first_type(OperatorId id) {
  return id == OperatorId::opT3_1 || id == OperatorId::opT3_2 || id == OperatorId::opT3_3;
}

// Name of the system an operator is stated for.
inline const char* host_system_name(OperatorId id) {
  switch (id) {
    case OperatorId::op37:
    case OperatorId::opT3_3: return "sys36";
    case OperatorId::op39:
    case OperatorId::op40:
    case OperatorId::op40s:
    case OperatorId::opT3_1:
    case OperatorId::opT3_2: return "sys38";
    case OperatorId::op39a:
    case OperatorId::op42: return "sys41";
    default: return "sys43";
  }
}

struct OperatorConstants {
  double alpha = 1.0;
  double alpha1 = 0.5;
  double alpha2 = 1.0;
  double alpha3 = 1.0;
  double alpha4 = 0.0;
};

struct OperatorSpec {
  OperatorId id = OperatorId::op39;
  SystemId host = system::Sys38{2.0, 1.0, 2.0, 1.0};
  OperatorConstants k;
};

// Admissibility restrictions on the operator constants and the host pairing.
// Operators stated for sys38 may also be hosted on sys136, in which case they
// are carried through the substitution u = -b U, v = -c V.
inline std::vector<std::string> operator_violations(const OperatorSpec& s) {
  std::vector<std::string> out;
  const std::string host = system_name(s.host);
  const std::string want = host_system_name(s.id);
  if (host != want && !(want == "sys38" && host == "sys136")) {
    out.push_back(std::string(operator_name(s.id)) + " requires host " + want + ", got " + host);
    return out;
  }
  const DlvParams p = expand(s.host);
  if (p.lambda1 == p.lambda2) out.push_back("lambda1 != lambda2");
  const auto bind = system_bindings(s.host);
  switch (s.id) {
    case OperatorId::op39:
      if (p.a1 == 0.0 && p.a2 == 0.0) out.push_back("a1^2 + a2^2 != 0");
      break;
    case OperatorId::op40:
    case OperatorId::op40s:
    case OperatorId::opT3_1:
    case OperatorId::opT3_2:
      if (p.a1 == p.a2) out.push_back("a1 != a2");
      break;
    case OperatorId::op39a:
    case OperatorId::op39b:
    case OperatorId::op40a:
    case OperatorId::op40b:
      if (bind.at("a") == 0.0) out.push_back("a != 0");
      break;
    case OperatorId::op44:
      if (bind.at("a") == 0.0) out.push_back("a != 0");
      if (s.k.alpha == 0.0) out.push_back("alpha != 0");
      break;
    case OperatorId::op37:
    case OperatorId::opT3_3:
      if (s.k.alpha3 == 0.0 && s.k.alpha4 == 0.0) out.push_back("alpha3^2 + alpha4^2 != 0");
      break;
    case OperatorId::op42: break;
  }
  if (host == "sys136") {
    if (bind.at("b") == 0.0) out.push_back("b != 0");
    if (bind.at("c") == 0.0) out.push_back("c != 0");
  }
  return out;
}

// Carries an operator of the b = c = 1 system to the competition form
// through u = -b U, v = -c V.
inline LinearOperator map_to_competition(const LinearOperator& op, double b, double c) {
  using sym::Expr;
  return {op.xi, Expr(c / b) * op.q1, Expr(b / c) * op.q2, op.r1, op.r2, Expr(-1.0 / b) * op.p1,
          Expr(-1.0 / c) * op.p2};
}

inline LinearOperator make_operator(const OperatorSpec& s) {
  using sym::Expr;
  if (auto v = operator_violations(s); !v.empty()) {
    std::string msg = std::string(operator_name(s.id)) + ":";
    for (const auto& x : v) msg += " " + x + ";";
    throw OperatorConstraintError(msg, std::move(v));
  }
  const auto b = system_bindings(s.host);
  const double l1 = b.at("lambda1");
  const double l2 = b.at("lambda2");
  const double L = l1 - l2;
  const Expr t = sym::var("t");
  const Expr x = sym::var("x");
  const Expr zero(0.0);
  LinearOperator op{zero, zero, zero, zero, zero, zero, zero};

  switch (s.id) {
    case OperatorId::op39: {
      const double a1 = b.at("a1"), a2 = b.at("a2");
      op.q1 = Expr(-a1 / L);
      op.r1 = Expr(-a2 / L);
      op.p1 = Expr(-a1 * a2 / L);
      op.q2 = Expr(a2 / L);
      op.r2 = Expr(a1 / L);
      op.p2 = Expr(a1 * a2 / L);
      break;
    }
    case OperatorId::op40:
    case OperatorId::opT3_1: {
      const double beta = (b.at("a1") - b.at("a2")) / L;
      op.r1 = Expr(beta);
      op.q2 = Expr(-beta);
      break;
    }
    case OperatorId::op40s:
    case OperatorId::opT3_2: {
      const double beta = (b.at("a1") - b.at("a2")) / L;
      op.q1 = Expr(-beta);
      op.r2 = Expr(beta);
      break;
    }
    case OperatorId::op39a: {
      const double a = b.at("a");
      op.q1 = op.r1 = Expr(-a / L);
      op.p1 = Expr(-a * a / L);
      op.q2 = op.r2 = Expr(a / L);
      op.p2 = Expr(a * a / L);
      break;
    }
    case OperatorId::op42: {
      const Expr Lt = Expr(L) * t;
      op.q1 = Expr(-l1) / Lt;
      op.r1 = Expr(-l2) / Lt;
      op.q2 = Expr(l2) / Lt;
      op.r2 = Expr(l1) / Lt;
      break;
    }
    case OperatorId::op39b: {
      const double a = b.at("a");
      op.q1 = Expr(-a * l1 / L);
      op.r1 = Expr(-a * l2 / L);
      op.p1 = Expr(-a * a * l1 * l2 / L);
      op.q2 = Expr(a * l2 / L);
      op.r2 = Expr(a * l1 / L);
      op.p2 = Expr(a * a * l1 * l2 / L);
      break;
    }
    case OperatorId::op40a: {
      const double a = b.at("a");
      op.r1 = Expr(a);
      op.q2 = Expr(-a);
      break;
    }
    case OperatorId::op40b: {
      const double a = b.at("a");
      op.q1 = Expr(-a);
      op.r2 = Expr(a);
      break;
    }
    case OperatorId::op44: {
      const double a = b.at("a");
      const double al = s.k.alpha;
      const Expr D = sym::exp(Expr(-a) * t) - Expr(al * L);
      op.q1 = Expr(a * al * l1) / D;
      op.r1 = Expr(a * al * l2) / D;
      op.p1 = Expr(a * a * al * l1 * l2) / D;
      op.q2 = Expr(-a * al * l2) / D;
      op.r2 = Expr(-a * al * l1) / D;
      op.p2 = Expr(-a * a * al * l1 * l2) / D;
      break;
    }
    case OperatorId::op37:
    case OperatorId::opT3_3: {
      const double a1 = b.at("a1");
      const auto& k = s.k;
      const Expr E = sym::exp(Expr(k.alpha1) * x + Expr(k.alpha1 * k.alpha1 / l2) * t);
      op.xi = Expr(2.0 * k.alpha1 / L);
      op.q2 = E * (Expr(k.alpha3) + Expr(k.alpha4) * sym::exp(Expr(-a1 / l2) * t));
      op.r2 = Expr(k.alpha2);
      op.p2 = Expr(k.alpha3 * a1) * E;
      break;
    }
  }
  if (system_name(s.host) == "sys136") op = map_to_competition(op, b.at("b"), b.at("c"));
  return op;
}

// Random constants and host parameters satisfying the operator's
// restrictions, kept away from degenerate values.
inline OperatorSpec random_admissible(OperatorId id, Rng& rng) {
  const auto sgn = [&] { return rng.uniform() < 0.5 ? -1.0 : 1.0; };
  const auto mag = [&](double lo, double hi) { return sgn() * rng.uniform(lo, hi); };
  double l1 = rng.uniform(0.5, 3.0);
  double l2 = rng.uniform(0.5, 3.0);
  while (std::fabs(l1 - l2) < 0.3) l2 = rng.uniform(0.5, 3.0);
  const double a1 = rng.uniform(-2.0, 2.0);
  double a2 = rng.uniform(-2.0, 2.0);
  while (std::fabs(a1 - a2) < 0.5) a2 = rng.uniform(-2.0, 2.0);
  const double a = mag(0.3, 2.0);

  OperatorSpec s;
  s.id = id;
  s.k.alpha = mag(0.3, 2.0);
  s.k.alpha1 = mag(0.2, 1.0);
  s.k.alpha2 = mag(0.5, 1.5);
  s.k.alpha3 = mag(0.5, 1.5);
  s.k.alpha4 = mag(0.5, 1.5);
  const std::string host = host_system_name(id);
  if (host == "sys36") {
    s.host = system::Sys36{l1, l2, a1};
  } else if (host == "sys38") {
    s.host = system::Sys38{l1, l2, a1, a2};
  } else if (host == "sys41") {
    s.host = system::Sys41{l1, l2, a};
  } else {
    s.host = system::Sys43{l1, l2, a};
  }
  // Keep the d/dt coefficient of op44 away from zero: exp(-a t) > 0 and
  // -alpha (l1 - l2) > 0.
  if (id == OperatorId::op44 && s.k.alpha * (l1 - l2) > 0) s.k.alpha = -s.k.alpha;
  return s;
}

// ---------------------------------------------------------------------------
// Determining equations

inline constexpr int kLinearEquations = 16;
inline constexpr int kGeneralEquations = 15;

inline std::string linear_equation_id(int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "EQ%02d", k + 1);
  return buf;
}

inline std::string general_equation_id(int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "G%02d", k + 1);
  return buf;
}

// Residual expressions in (t, x) of the reduced determining system for an
// operator of linear form.
inline std::array<sym::Expr, kLinearEquations> linear_det_exprs(const LinearOperator& op, const DlvParams& p) {
  using sym::Expr;
  const auto d = [](const Expr& e, const char* v) { return sym::diff(e, v); };
  const auto dd = [](const Expr& e, const char* v) { return sym::diff(e, v, 2); };
  const Expr L1(p.lambda1), L2(p.lambda2), A1(p.a1), A2(p.a2), B1(p.b1), B2(p.b2), C1(p.c1), C2(p.c2);
  const Expr dl(p.lambda1 - p.lambda2);
  const Expr da(p.a1 - p.a2);
  const Expr two(2.0);
  const auto& [xi, q1, q2, r1, r2, p1, p2] = op;
  const Expr xx = d(xi, "x");

  return {
      Expr(p.c1 - p.c2) * q1,
      Expr(p.b1 - p.b2) * q2,
      C1 * q2 + B1 * (r1 + two * xx),
      B2 * q1 + C2 * (r2 + two * xx),
      Expr(2 * p.b1 - p.b2) * q1 + C1 * (r2 + two * xx),
      Expr(2 * p.c2 - p.c1) * q2 + B2 * (r1 + two * xx),
      dl * xi * q1 + two * d(q1, "x"),
      -dl * xi * q2 + two * d(q2, "x"),
      L1 * (d(xi, "t") + two * xi * xx) + two * d(r1, "x") - dd(xi, "x"),
      L2 * (d(xi, "t") + two * xi * xx) + two * d(r2, "x") - dd(xi, "x"),
      L1 * (d(r1, "t") + two * r1 * xx) + dl * q1 * q2 - C1 * p2 - two * B1 * p1 - two * A1 * xx - dd(r1, "x"),
      L2 * (d(r2, "t") + two * r2 * xx) - dl * q1 * q2 - B2 * p1 - two * C2 * p2 - two * A2 * xx - dd(r2, "x"),
      L1 * (d(q1, "t") + two * q1 * xx) + dl * q1 * r2 - da * q1 - C1 * p1 - dd(q1, "x"),
      L2 * (d(q2, "t") + two * q2 * xx) - dl * q2 * r1 + da * q2 - B2 * p2 - dd(q2, "x"),
      L1 * (d(p1, "t") + two * p1 * xx) + dl * q1 * p2 - A1 * p1 - dd(p1, "x"),
      L2 * (d(p2, "t") + two * p2 * xx) - dl * q2 * p1 - A2 * p2 - dd(p2, "x"),
  };
}

// Residual expressions in (t, x, u, v) of the full nonlinear determining
// system for a general operator (normalised first).
inline std::array<sym::Expr, kGeneralEquations> general_det_exprs(const GeneralOperator& general, const DlvParams& p) {
  using sym::Expr;
  const GeneralOperator op = general.normalised();
  const auto d = [](const Expr& e, const char* v) { return sym::diff(e, v); };
  const auto d2 = [](const Expr& e, const char* v, const char* w) { return sym::diff(sym::diff(e, v), w); };
  const Expr u = sym::var("u"), v = sym::var("v");
  const Expr L1(p.lambda1), L2(p.lambda2), B1(p.b1), B2(p.b2), C1(p.c1), C2(p.c2);
  const Expr two(2.0);
  const Expr& xi = op.xi1;
  const Expr& e1 = op.eta1;
  const Expr& e2 = op.eta2;
  const Expr Fk = Expr(p.a1) + B1 * u + C1 * v;  // F = u Fk
  const Expr Gk = Expr(p.a2) + B2 * u + C2 * v;  // G = v Gk
  const Expr xi_x = d(xi, "x"), xi_u = d(xi, "u"), xi_v = d(xi, "v");

  return {
      d2(xi, "u", "u"),
      d2(xi, "v", "v"),
      d2(xi, "u", "v"),
      d2(e1, "v", "v"),
      d2(e2, "u", "u"),
      two * L1 * xi * xi_u + d2(e1, "u", "u") - two * d2(xi, "x", "u"),
      two * L2 * xi * xi_v + d2(e2, "v", "v") - two * d2(xi, "x", "v"),
      (L1 + L2) * xi * xi_v + two * d2(e1, "u", "v") - two * d2(xi, "x", "v"),
      (L1 + L2) * xi * xi_u + two * d2(e2, "u", "v") - two * d2(xi, "x", "u"),
      (L1 - L2) * xi * d(e1, "v") + two * d2(e1, "x", "v") + two * u * Fk * xi_v - two * L1 * xi_v * e1,
      (L2 - L1) * xi * d(e2, "u") + two * d2(e2, "x", "u") + two * v * Gk * xi_u - two * L2 * xi_u * e2,
      L1 * (two * xi_u * e1 - d(xi, "t") - xi_v * e2 - two * xi * xi_x) + L2 * xi_v * e2 - Expr(3.0) * xi_u * u * Fk -
          xi_v * v * Gk - two * d2(e1, "x", "u") + d2(xi, "x", "x"),
      L2 * (two * xi_v * e2 - d(xi, "t") - xi_u * e1 - two * xi * xi_x) + L1 * xi_u * e1 - Expr(3.0) * xi_v * v * Gk -
          xi_u * u * Fk - two * d2(e2, "x", "v") + d2(xi, "x", "x"),
      L1 * (d(e1, "t") + e2 * d(e1, "v") + two * xi_x * e1) - L2 * e2 * d(e1, "v") -
          e1 * (Expr(p.a1) + two * B1 * u + C1 * v) - C1 * e2 * u + d(e1, "u") * u * Fk - two * xi_x * u * Fk +
          d(e1, "v") * v * Gk - d2(e1, "x", "x"),
      L2 * (d(e2, "t") + e1 * d(e2, "u") + two * xi_x * e2) - L1 * e1 * d(e2, "u") -
          e2 * (Expr(p.a2) + B2 * u + two * C2 * v) - B2 * e1 * v + d(e2, "u") * u * Fk - two * xi_x * v * Gk +
          d(e2, "v") * v * Gk - d2(e2, "x", "x"),
  };
}

namespace detail {

template <std::size_t N>
std::array<double, N> eval_all(const std::array<sym::Expr, N>& exprs, const sym::Bindings& at) {
  std::array<double, N> out{};
  for (std::size_t k = 0; k < N; ++k) out[k] = sym::eval_expr(exprs[k], at);
  return out;
}

}  // namespace detail

inline std::array<double, kLinearEquations> linear_det_residuals(const LinearOperator& op, const DlvParams& p,
                                                                 double t, double x) {
  return detail::eval_all(linear_det_exprs(op, p), {{"t", t}, {"x", x}});
}

inline std::array<double, kGeneralEquations> general_det_residuals(const GeneralOperator& op, const DlvParams& p,
                                                                   double t, double x, double u, double v) {
  return detail::eval_all(general_det_exprs(op, p), {{"t", t}, {"x", x}, {"u", u}, {"v", v}});
}

// ---------------------------------------------------------------------------
// Sampled checks

struct SampleBox {
  double t_lo = 0.1, t_hi = 2.0;
  double x_lo = 0.1, x_hi = 2.0;
  double u_lo = -2.0, u_hi = 2.0;
  double v_lo = -2.0, v_hi = 2.0;
  int samples = sym::kIdentitySamples;
  std::uint64_t seed = 0;
  double tolerance = sym::kIdentityTolerance;
};

struct EquationResidual {
  std::string id;
  double max_resid = 0.0;
};

struct DetReport {
  std::vector<EquationResidual> equations;
  bool pass = false;
  std::uint64_t seed = 0;
  int samples = 0;
  int pole_retries = 0;
  double tolerance = 0.0;

  double worst() const {
    double w = 0.0;
    for (const auto& e : equations) w = std::max(w, e.max_resid);
    return w;
  }

  std::string to_text() const {
    std::string out;
    char buf[96];
    for (const auto& e : equations) {
      std::snprintf(buf, sizeof buf, "%s: max_resid=%.6e\n", e.id.c_str(), e.max_resid);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "samples: %d\nseed: %llu\nresult: %s\n", samples,
                  static_cast<unsigned long long>(seed), pass ? "pass" : "fail");
    out += buf;
    return out;
  }
};

namespace detail {

// Evaluates all expressions at the same random points of the box; points
// where any expression hits a pole are redrawn.
template <std::size_t N>
DetReport sample_residuals(const std::array<sym::Expr, N>& exprs, const std::vector<std::string>& slots,
                           const std::vector<std::pair<double, double>>& ranges, const SampleBox& box,
                           std::string (*name)(int)) {
  std::vector<sym::Compiled> programs;
  programs.reserve(N);
  for (const auto& e : exprs) programs.emplace_back(e, slots);
  DetReport rep;
  rep.seed = box.seed;
  rep.tolerance = box.tolerance;
  std::vector<double> worst(N, 0.0);
  std::vector<double> at(slots.size());
  std::array<double, N> vals{};
  Rng rng(box.seed);
  for (int i = 0; i < box.samples; ++i) {
    for (int attempt = 0; attempt <= sym::kPoleRetries; ++attempt) {
      for (std::size_t k = 0; k < ranges.size(); ++k) at[k] = rng.uniform(ranges[k].first, ranges[k].second);
      bool ok = true;
      for (std::size_t k = 0; k < N && ok; ++k) {
        double scale = 0.0;
        try {
          vals[k] = programs[k](at, &scale);
        } catch (const sym::EvalError& e) {
          if (e.kind() == sym::EvalError::Kind::UnboundVariable) throw;
          ok = false;
        }
        if (scale > sym::kPoleMagnitude) ok = false;
      }
      if (!ok) {
        ++rep.pole_retries;
        continue;
      }
      ++rep.samples;
      for (std::size_t k = 0; k < N; ++k) worst[k] = std::max(worst[k], std::fabs(vals[k]));
      break;
    }
  }
  if (rep.samples == 0) throw sym::InconclusiveError("determining-equation check: every sample hit a pole");
  rep.pass = true;
  for (std::size_t k = 0; k < N; ++k) {
    rep.equations.push_back({name(static_cast<int>(k)), worst[k]});
    if (!(worst[k] <= box.tolerance)) rep.pass = false;
  }
  return rep;
}

}  // namespace detail

inline DetReport check_operator(const LinearOperator& op, const DlvParams& p, const SampleBox& box = {}) {
  return detail::sample_residuals(linear_det_exprs(op, p), {"t", "x"},
                                  {{box.t_lo, box.t_hi}, {box.x_lo, box.x_hi}}, box, &linear_equation_id);
}

// Builds the operator from its spec (constraints are checked first) and
// tests it against `target`, which defaults to the host system.
inline DetReport check_operator(const OperatorSpec& spec, const SampleBox& box = {}) {
  return check_operator(make_operator(spec), expand(spec.host), box);
}

inline DetReport check_operator(const OperatorSpec& spec, const DlvParams& target, const SampleBox& box = {}) {
  return check_operator(make_operator(spec), target, box);
}

inline DetReport check_general_operator(const GeneralOperator& op, const DlvParams& p, const SampleBox& box = {}) {
  return detail::sample_residuals(
      general_det_exprs(op, p), {"t", "x", "u", "v"},
      {{box.t_lo, box.t_hi}, {box.x_lo, box.x_hi}, {box.u_lo, box.u_hi}, {box.v_lo, box.v_hi}}, box,
      &general_equation_id);
}

// Moves one named coefficient by a relative amount; zero coefficients move
// by `rel` absolutely.
inline DlvParams perturb(DlvParams p, const std::string& name, double rel) {
  double* slot = nullptr;
  if (name == "lambda1") slot = &p.lambda1;
  else if (name == "lambda2") slot = &p.lambda2;
  else if (name == "a1") slot = &p.a1;
  else if (name == "a2") slot = &p.a2;
  else if (name == "b1") slot = &p.b1;
  else if (name == "b2") slot = &p.b2;
  else if (name == "c1") slot = &p.c1;
  else if (name == "c2") slot = &p.c2;
  else throw std::invalid_argument("unknown coefficient '" + name + "'");
  *slot = *slot == 0.0 ? rel : *slot * (1.0 + rel);
  return p;
}

// ---------------------------------------------------------------------------
// Invariant-surface conditions

struct SurfaceReport {
  double max_qu = 0.0;  // max |u_t + xi u_x - eta1|
  double max_qv = 0.0;  // max |v_t + xi v_x - eta2|
  int evaluated = 0;
  int excluded = 0;
};

using JetFunction = std::function<FieldJet(double t, double x)>;

inline SurfaceReport invariant_surface_residual(const LinearOperator& op, const JetFunction& jet,
                                                const GridSpec& grid) {
  const std::vector<std::string> slots{"t", "x"};
  const sym::Compiled xi(op.xi, slots), q1(op.q1, slots), q2(op.q2, slots), r1(op.r1, slots), r2(op.r2, slots),
      p1(op.p1, slots), p2(op.p2, slots);
  SurfaceReport rep;
  for (int i = 0; i < grid.nt; ++i) {
    for (int j = 0; j < grid.nx; ++j) {
      const double at[2] = {grid.t(i), grid.x(j)};
      try {
        const FieldJet f = jet(at[0], at[1]);
        const double s = xi(at);
        const double eta1 = q1(at) * f.v + r1(at) * f.u + p1(at);
        const double eta2 = q2(at) * f.u + r2(at) * f.v + p2(at);
        rep.max_qu = std::max(rep.max_qu, std::fabs(f.u_t + s * f.u_x - eta1));
        rep.max_qv = std::max(rep.max_qv, std::fabs(f.v_t + s * f.v_x - eta2));
        ++rep.evaluated;
      } catch (const sym::EvalError&) {
        ++rep.excluded;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Case b = c = 1 with coefficients depending on t only:
//   q1 = -psi, r2 = psi, q2 = -phi, r1 = phi, xi = 0,
// p1, p2 reconstructed from phi, psi.

inline std::pair<sym::Expr, sym::Expr> case13_p(const sym::Expr& phi, const sym::Expr& psi, const DlvParams& p) {
  using sym::Expr;
  const double L = p.lambda1 - p.lambda2;
  const Expr p1 = Expr(p.a1 - p.a2) * psi - Expr(L) * sym::pow(psi, 2.0) - Expr(p.lambda1) * sym::diff(psi, "t");
  const Expr p2 = Expr(p.a2 - p.a1) * phi + Expr(L) * sym::pow(phi, 2.0) - Expr(p.lambda2) * sym::diff(phi, "t");
  return {p1, p2};
}

inline LinearOperator case13_operator(const sym::Expr& phi, const sym::Expr& psi, const DlvParams& p) {
  const auto [p1, p2] = case13_p(phi, psi, p);
  return {sym::Expr(0.0), -psi, -phi, phi, psi, p1, p2};
}

// Residuals of the two first-order ODEs for (phi, psi) and of the
// classification equation.
inline std::array<sym::Expr, 3> case13_exprs(const sym::Expr& phi, const sym::Expr& psi, const DlvParams& p) {
  using sym::Expr;
  const double l1 = p.lambda1, l2 = p.lambda2, L = l1 - l2;
  if (L == 0.0) throw DegenerateParameters("case13: lambda1 == lambda2");
  const Expr common = Expr(p.a2 - p.a1) + Expr(L) * (phi + psi);
  const Expr inv(1.0 / (L * L));
  const Expr ode_phi = sym::diff(phi, "t") + inv * common * (Expr(3 * l1 - l2) * phi + Expr(2 * l2) * psi);
  const Expr ode_psi = sym::diff(psi, "t") - inv * common * (Expr(2 * l1) * phi + Expr(3 * l2 - l1) * psi);
  const Expr classify = (Expr(p.a1 - p.a2) - Expr(L) * (phi + psi)) * (Expr(l1) * phi + Expr(l2) * psi) *
                        (Expr(p.a1 * (4 * l1 + 5 * l2) - p.a2 * (5 * l1 + 4 * l2)) -
                         Expr(4 * L) * (Expr(2 * l1 + l2) * phi + Expr(l1 + 2 * l2) * psi));
  return {ode_phi, ode_psi, classify};
}

struct Case13Report {
  std::array<double, 3> max_resid{};
  int samples = 0;
  bool pass = false;
};

inline Case13Report case13_consistency(const sym::Expr& phi, const sym::Expr& psi, const DlvParams& p,
                                       double t_lo = 0.5, double t_hi = 2.0, int n = sym::kIdentitySamples,
                                       std::uint64_t seed = 0, double tol = sym::kIdentityTolerance) {
  const auto exprs = case13_exprs(phi, psi, p);
  SampleBox box;
  box.t_lo = t_lo;
  box.t_hi = t_hi;
  box.samples = n;
  box.seed = seed;
  box.tolerance = tol;
  const DetReport r = detail::sample_residuals(exprs, {"t"}, {{t_lo, t_hi}}, box, &linear_equation_id);
  Case13Report out;
  for (int k = 0; k < 3; ++k) out.max_resid[k] = r.equations[k].max_resid;
  out.samples = r.samples;
  out.pass = r.pass;
  return out;
}

}  // namespace dlv

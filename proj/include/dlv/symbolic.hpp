#pragma once

// Minimal expression kernel: immutable expression trees over named real
// variables with parsing, printing, exact differentiation, evaluation and
// randomized identity testing.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dlv/random.hpp"

namespace dlv::sym {

enum class Op : std::uint8_t {
  Const,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  Pow,  // exponent is a real constant
  Neg,
  Exp,
  Sin,
  Cos,
  Tan,
  Sinh,
  Cosh,
  Tanh,
  Sqrt,
};

inline bool is_function(Op op) { return op >= Op::Exp; }

inline const char* function_name(Op op) {
  switch (op) {
    case Op::Exp: return "exp";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Sinh: return "sinh";
    case Op::Cosh: return "cosh";
    case Op::Tanh: return "tanh";
    case Op::Sqrt: return "sqrt";
    default: return "";
  }
}

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, SymbolicExponent };

  ParseError(Kind kind, std::size_t offset, const std::string& what)
      : std::runtime_error(what + " at byte " + std::to_string(offset)),
        kind_(kind),
        offset_(offset) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

class EvalError : public std::runtime_error {
 public:
  enum class Kind { UnboundVariable, Pole, Domain };

  EvalError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Expr {
 public:
  Expr() : Expr(0.0) {}
  Expr(double c) : node_(std::make_shared<const Node>(Node{Op::Const, c, {}, {}, {}})) {}  // NOLINT

  static Expr constant(double c) { return Expr(c); }
  static Expr variable(std::string name) {
    return Expr(std::make_shared<const Node>(Node{Op::Var, 0.0, std::move(name), {}, {}}));
  }
  // Raw node construction; no folding. Prefer the free-function builders.
  static Expr make(Op op, const Expr& a, const Expr& b) {
    return Expr(std::make_shared<const Node>(Node{op, 0.0, {}, a.node_, b.node_}));
  }
  static Expr make(Op op, const Expr& a, double value = 0.0) {
    return Expr(std::make_shared<const Node>(Node{op, value, {}, a.node_, nullptr}));
  }

  Op op() const { return node_->op; }
  // Constant value, or the exponent of a Pow node.
  double value() const { return node_->value; }
  const std::string& name() const { return node_->name; }
  Expr lhs() const { return Expr(node_->a); }
  Expr rhs() const { return Expr(node_->b); }
  Expr arg() const { return Expr(node_->a); }

  bool is_constant() const { return op() == Op::Const; }
  bool is_constant(double c) const { return op() == Op::Const && value() == c; }

  std::set<std::string> variables() const {
    std::set<std::string> out;
    collect(node_.get(), out);
    return out;
  }

  friend bool operator==(const Expr& x, const Expr& y) { return equal(x.node_.get(), y.node_.get()); }

 private:
  struct Node {
    Op op;
    double value;
    std::string name;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
  };

  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static void collect(const Node* n, std::set<std::string>& out) {
    if (n == nullptr) return;
    if (n->op == Op::Var) out.insert(n->name);
    collect(n->a.get(), out);
    collect(n->b.get(), out);
  }

  static bool equal(const Node* x, const Node* y) {
    if (x == y) return true;
    if (x == nullptr || y == nullptr) return false;
    if (x->op != y->op) return false;
    switch (x->op) {
      case Op::Const: return x->value == y->value;
      case Op::Var: return x->name == y->name;
      case Op::Pow: return x->value == y->value && equal(x->a.get(), y->a.get());
      default: return equal(x->a.get(), y->a.get()) && equal(x->b.get(), y->b.get());
    }
  }

  std::shared_ptr<const Node> node_;
};

using Bindings = std::map<std::string, double, std::less<>>;

namespace detail {

inline double apply_function(Op op, double a) {
  switch (op) {
    case Op::Exp: return std::exp(a);
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Tan: return std::tan(a);
    case Op::Sinh: return std::sinh(a);
    case Op::Cosh: return std::cosh(a);
    case Op::Tanh: return std::tanh(a);
    case Op::Sqrt: return std::sqrt(a);
    default: return a;
  }
}

inline double apply_binary(Op op, double a, double b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    default: return 0.0;
  }
}

}  // namespace detail

// Builders with local constant folding and unit/zero elimination. This is not
// a simplifier: no rewriting beyond a single node is ever attempted.
inline Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.value() + b.value());
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return Expr::make(Op::Add, a, b);
}

inline Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(-a.value());
  if (a.op() == Op::Neg) return a.arg();
  return Expr::make(Op::Neg, a);
}

inline Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.value() - b.value());
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return Expr::make(Op::Sub, a, b);
}

inline Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.value() * b.value());
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  return Expr::make(Op::Mul, a, b);
}

inline Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.value() != 0.0) return Expr(a.value() / b.value());
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr(0.0);
  if (b.is_constant(1.0)) return a;
  return Expr::make(Op::Div, a, b);
}

inline Expr pow(const Expr& base, double exponent) {
  if (exponent == 0.0) return Expr(1.0);
  if (exponent == 1.0) return base;
  if (base.is_constant()) {
    const double v = std::pow(base.value(), exponent);
    if (std::isfinite(v)) return Expr(v);
  }
  return Expr::make(Op::Pow, base, exponent);
}

inline Expr apply(Op fn, const Expr& a) {
  if (a.is_constant()) {
    const double v = detail::apply_function(fn, a.value());
    if (std::isfinite(v)) return Expr(v);
  }
  return Expr::make(fn, a);
}

inline Expr exp(const Expr& a) { return apply(Op::Exp, a); }
inline Expr sin(const Expr& a) { return apply(Op::Sin, a); }
inline Expr cos(const Expr& a) { return apply(Op::Cos, a); }
inline Expr tan(const Expr& a) { return apply(Op::Tan, a); }
inline Expr sinh(const Expr& a) { return apply(Op::Sinh, a); }
inline Expr cosh(const Expr& a) { return apply(Op::Cosh, a); }
inline Expr tanh(const Expr& a) { return apply(Op::Tanh, a); }
inline Expr sqrt(const Expr& a) { return apply(Op::Sqrt, a); }
inline Expr coth(const Expr& a) { return cosh(a) / sinh(a); }

inline Expr var(std::string name) { return Expr::variable(std::move(name)); }

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Const: return e.value() < 0.0 || std::signbit(e.value()) ? 3 : 5;
    case Op::Pow: return 4;
    default: return 5;
  }
}

inline std::string format_number(double v) {
  char buf[40];
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

inline void print(const Expr& e, std::string& out);

inline void print_child(const Expr& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print(child, out);
  if (parens) out += ')';
}

inline void print(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::Const: out += format_number(e.value()); return;
    case Op::Var: out += e.name(); return;
    case Op::Neg:
      out += '-';
      print_child(e.arg(), precedence(e.arg()) < 3, out);
      return;
    case Op::Pow: {
      print_child(e.arg(), precedence(e.arg()) <= 4, out);
      out += '^';
      const double k = e.value();
      if (k < 0.0) {
        out += '(' + format_number(k) + ')';
      } else {
        out += format_number(k);
      }
      return;
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const int p = precedence(e);
      print_child(e.lhs(), precedence(e.lhs()) < p, out);
      switch (e.op()) {
        case Op::Add: out += " + "; break;
        case Op::Sub: out += " - "; break;
        case Op::Mul: out += '*'; break;
        default: out += '/'; break;
      }
      print_child(e.rhs(), precedence(e.rhs()) <= p, out);
      return;
    }
    default:
      out += function_name(e.op());
      out += '(';
      print(e.arg(), out);
      out += ')';
      return;
  }
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing
//
// Grammar (juxtaposition is not multiplication):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | '+' unary | power
//   power   := primary ('^' unary)?
//   primary := number | ident | ident '(' expr ')' | '(' expr ')'
// `coth(e)` is expanded to cosh(e)/sinh(e); `pi` is the constant.

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, const std::set<std::string>* allowed) : text_(text), allowed_(allowed) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail(ParseError::Kind::Syntax, "unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(ParseError::Kind kind, const std::string& what) const { throw ParseError(kind, pos_, what); }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) {
        e = e + term();
      } else if (accept('-')) {
        e = e - term();
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) {
        e = e * unary();
      } else if (accept('/')) {
        e = e / unary();
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    skip_ws();
    const std::size_t at = pos_;
    if (accept('^')) {
      Expr k = unary();
      if (!k.is_constant()) {
        pos_ = at;
        fail(ParseError::Kind::SymbolicExponent, "exponent must be a real constant");
      }
      return sym::pow(base, k.value());
    }
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail(ParseError::Kind::Syntax, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) fail(ParseError::Kind::Syntax, "expected ')'");
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(ParseError::Kind::Syntax, std::string("unexpected '") + c + "'");
  }

  Expr number() {
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc()) fail(ParseError::Kind::Syntax, "malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return Expr(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      static const std::map<std::string, Op, std::less<>> functions = {
          {"exp", Op::Exp},   {"sin", Op::Sin},   {"cos", Op::Cos},   {"tan", Op::Tan},
          {"sinh", Op::Sinh}, {"cosh", Op::Cosh}, {"tanh", Op::Tanh}, {"sqrt", Op::Sqrt}};
      const bool is_coth = name == "coth";
      const auto it = functions.find(name);
      if (it == functions.end() && !is_coth) {
        pos_ = start;
        fail(ParseError::Kind::UnknownIdentifier, "unknown function '" + name + "'");
      }
      ++pos_;
      Expr a = expr();
      if (!accept(')')) fail(ParseError::Kind::Syntax, "expected ')'");
      return is_coth ? coth(a) : apply(it->second, a);
    }
    if (name == "pi") return Expr(std::numbers::pi);
    if (allowed_ != nullptr && allowed_->count(name) == 0) {
      pos_ = start;
      fail(ParseError::Kind::UnknownIdentifier, "unknown identifier '" + name + "'");
    }
    return var(name);
  }

  std::string_view text_;
  const std::set<std::string>* allowed_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Any identifier that is not a function name becomes a variable.
inline Expr parse_expr(std::string_view text) { return detail::Parser(text, nullptr).parse(); }

// Identifiers outside `declared` are rejected.
inline Expr parse_expr(std::string_view text, const std::set<std::string>& declared) {
  return detail::Parser(text, &declared).parse();
}

// ---------------------------------------------------------------------------
// Differentiation

inline Expr diff(const Expr& e, const std::string& v) {
  switch (e.op()) {
    case Op::Const: return Expr(0.0);
    case Op::Var: return Expr(e.name() == v ? 1.0 : 0.0);
    case Op::Add: return diff(e.lhs(), v) + diff(e.rhs(), v);
    case Op::Sub: return diff(e.lhs(), v) - diff(e.rhs(), v);
    case Op::Neg: return -diff(e.arg(), v);
    case Op::Mul: return diff(e.lhs(), v) * e.rhs() + e.lhs() * diff(e.rhs(), v);
    case Op::Div: {
      const Expr& f = e.lhs();
      const Expr& g = e.rhs();
      const Expr df = diff(f, v);
      const Expr dg = diff(g, v);
      if (dg.is_constant(0.0)) return df / g;
      return (df * g - f * dg) / pow(g, 2.0);
    }
    case Op::Pow: {
      const double k = e.value();
      return Expr(k) * pow(e.arg(), k - 1.0) * diff(e.arg(), v);
    }
    default: break;
  }
  const Expr a = e.arg();
  const Expr da = diff(a, v);
  if (da.is_constant(0.0)) return Expr(0.0);
  switch (e.op()) {
    case Op::Exp: return e * da;
    case Op::Sin: return cos(a) * da;
    case Op::Cos: return -(sin(a) * da);
    case Op::Tan: return da / pow(cos(a), 2.0);
    case Op::Sinh: return cosh(a) * da;
    case Op::Cosh: return sinh(a) * da;
    case Op::Tanh: return (Expr(1.0) - pow(e, 2.0)) * da;
    case Op::Sqrt: return da / (Expr(2.0) * e);
    default: return Expr(0.0);
  }
}

inline Expr diff(const Expr& e, const std::string& v, int order) {
  Expr out = e;
  for (int i = 0; i < order; ++i) out = diff(out, v);
  return out;
}

// Replaces variables by expressions (or constants), refolding on the way up.
inline Expr substitute(const Expr& e, const std::map<std::string, Expr, std::less<>>& repl) {
  switch (e.op()) {
    case Op::Const: return e;
    case Op::Var: {
      const auto it = repl.find(e.name());
      return it == repl.end() ? e : it->second;
    }
    case Op::Add: return substitute(e.lhs(), repl) + substitute(e.rhs(), repl);
    case Op::Sub: return substitute(e.lhs(), repl) - substitute(e.rhs(), repl);
    case Op::Mul: return substitute(e.lhs(), repl) * substitute(e.rhs(), repl);
    case Op::Div: return substitute(e.lhs(), repl) / substitute(e.rhs(), repl);
    case Op::Neg: return -substitute(e.arg(), repl);
    case Op::Pow: return pow(substitute(e.arg(), repl), e.value());
    default: return apply(e.op(), substitute(e.arg(), repl));
  }
}

inline Expr substitute(const Expr& e, const Bindings& values) {
  std::map<std::string, Expr, std::less<>> repl;
  for (const auto& [k, v] : values) repl.emplace(k, Expr(v));
  return substitute(e, repl);
}

// ---------------------------------------------------------------------------
// Evaluation

// Flattened postfix program over a fixed variable slot order. Reusable and
// immutable once built, so it is safe to share across threads.
class Compiled {
 public:
  Compiled() = default;

  Compiled(const Expr& e, std::span<const std::string> slots) {
    std::vector<std::string> names(slots.begin(), slots.end());
    emit(e, names);
  }

  // Throws EvalError(Pole) on a non-finite result and EvalError(Domain) on a
  // negative square-root argument. `scale` receives max |intermediate|.
  double operator()(std::span<const double> values, double* scale = nullptr) const {
    thread_local std::vector<double> stack;
    stack.clear();
    double big = 0.0;
    for (const Instr& in : code_) {
      double r = 0.0;
      switch (in.op) {
        case Op::Const: r = in.value; break;
        case Op::Var: r = values[in.slot]; break;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: {
          const double b = stack.back();
          stack.pop_back();
          const double a = stack.back();
          stack.pop_back();
          if (in.op == Op::Div && b == 0.0) throw EvalError(EvalError::Kind::Pole, "division by zero");
          r = detail::apply_binary(in.op, a, b);
          break;
        }
        case Op::Neg:
          r = -stack.back();
          stack.pop_back();
          break;
        case Op::Pow: {
          const double a = stack.back();
          stack.pop_back();
          if (a == 0.0 && in.value < 0.0) throw EvalError(EvalError::Kind::Pole, "zero to a negative power");
          r = std::pow(a, in.value);
          break;
        }
        default: {
          const double a = stack.back();
          stack.pop_back();
          if (in.op == Op::Sqrt && a < 0.0) throw EvalError(EvalError::Kind::Domain, "sqrt of negative argument");
          r = detail::apply_function(in.op, a);
          break;
        }
      }
      if (!std::isfinite(r)) throw EvalError(EvalError::Kind::Pole, "non-finite value");
      big = std::max(big, std::fabs(r));
      stack.push_back(r);
    }
    if (scale != nullptr) *scale = big;
    return stack.back();
  }

 private:
  struct Instr {
    Op op;
    double value;
    std::size_t slot;
  };

  void emit(const Expr& e, const std::vector<std::string>& names) {
    switch (e.op()) {
      case Op::Const: code_.push_back({Op::Const, e.value(), 0}); return;
      case Op::Var: {
        for (std::size_t i = 0; i < names.size(); ++i) {
          if (names[i] == e.name()) {
            code_.push_back({Op::Var, 0.0, i});
            return;
          }
        }
        throw EvalError(EvalError::Kind::UnboundVariable, "unbound variable '" + e.name() + "'");
      }
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
        emit(e.lhs(), names);
        emit(e.rhs(), names);
        code_.push_back({e.op(), 0.0, 0});
        return;
      case Op::Pow:
        emit(e.arg(), names);
        code_.push_back({Op::Pow, e.value(), 0});
        return;
      default:
        emit(e.arg(), names);
        code_.push_back({e.op(), 0.0, 0});
        return;
    }
  }

  std::vector<Instr> code_;
};

namespace detail {

inline std::pair<std::vector<std::string>, std::vector<double>> split(const Bindings& b) {
  std::pair<std::vector<std::string>, std::vector<double>> out;
  for (const auto& [k, v] : b) {
    out.first.push_back(k);
    out.second.push_back(v);
  }
  return out;
}

}  // namespace detail

inline double eval_expr(const Expr& e, const Bindings& bindings, double* scale = nullptr) {
  auto [names, values] = detail::split(bindings);
  return Compiled(e, names)(values, scale);
}

// ---------------------------------------------------------------------------
// Randomized identity testing

struct SampleRange {
  std::string var;
  double lo = 0.0;
  double hi = 1.0;
};

struct IdentityReport {
  bool holds = false;
  double max_abs = 0.0;     // largest |e| over accepted samples
  double max_scaled = 0.0;  // largest |e| / (1 + local magnitude)
  int samples = 0;          // accepted sample points
  int pole_retries = 0;
  Bindings witness;  // worst point (the failing one when !holds)
};

inline constexpr double kPoleMagnitude = 1e12;
inline constexpr double kIdentityTolerance = 1e-9;
inline constexpr int kIdentitySamples = 64;
inline constexpr int kPoleRetries = 10;

// Samples `e` at n pseudo-random points of the box (plus the fixed bindings)
// and checks |e| <= tol * (1 + scale), where scale is the largest magnitude of
// any subexpression at that point. Points whose evaluation is non-finite or
// exceeds kPoleMagnitude are resampled up to kPoleRetries times.
inline IdentityReport identity_zero(const Expr& e, std::span<const SampleRange> box, int n = kIdentitySamples,
                                    std::uint64_t seed = 0, const Bindings& fixed = {},
                                    double tol = kIdentityTolerance) {
  if (n < 1) throw std::invalid_argument("identity_zero: n must be >= 1");
  std::vector<std::string> names;
  std::vector<double> values;
  for (const auto& r : box) {
    names.push_back(r.var);
    values.push_back(0.0);
  }
  for (const auto& [k, v] : fixed) {
    names.push_back(k);
    values.push_back(v);
  }
  const Compiled program(e, names);
  Rng rng(seed);
  IdentityReport rep;
  rep.holds = true;
  for (int i = 0; i < n; ++i) {
    for (int attempt = 0; attempt <= kPoleRetries; ++attempt) {
      for (std::size_t k = 0; k < box.size(); ++k) values[k] = rng.uniform(box[k].lo, box[k].hi);
      double scale = 0.0;
      double val = 0.0;
      try {
        val = program(values, &scale);
      } catch (const EvalError& err) {
        if (err.kind() == EvalError::Kind::UnboundVariable) throw;
        ++rep.pole_retries;
        continue;
      }
      if (scale > kPoleMagnitude) {
        ++rep.pole_retries;
        continue;
      }
      ++rep.samples;
      const double scaled = std::fabs(val) / (1.0 + scale);
      rep.max_abs = std::max(rep.max_abs, std::fabs(val));
      if (scaled >= rep.max_scaled) {
        rep.max_scaled = scaled;
        if (rep.holds) {
          rep.witness.clear();
          for (std::size_t k = 0; k < names.size(); ++k) rep.witness[names[k]] = values[k];
        }
      }
      if (scaled > tol && rep.holds) {
        rep.holds = false;
        rep.witness.clear();
        for (std::size_t k = 0; k < names.size(); ++k) rep.witness[names[k]] = values[k];
      }
      break;
    }
  }
  if (rep.samples == 0) throw InconclusiveError("identity_zero: every sample point hit a pole");
  return rep;
}

inline IdentityReport identity_zero(const Expr& e, std::initializer_list<SampleRange> box, int n = kIdentitySamples,
                                    std::uint64_t seed = 0, const Bindings& fixed = {},
                                    double tol = kIdentityTolerance) {
  return identity_zero(e, std::span<const SampleRange>(box.begin(), box.size()), n, seed, fixed, tol);
}

}  // namespace dlv::sym

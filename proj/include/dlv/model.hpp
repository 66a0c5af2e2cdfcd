#pragma once

// Parameter, system and grid value types shared by every module, plus the
// scenario configuration file reader.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dlv/symbolic.hpp"

namespace dlv {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateParameters : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Coefficients of
//   lambda1 u_t = u_xx + u (a1 + b1 u + c1 v)
//   lambda2 v_t = v_xx + v (a2 + b2 u + c2 v)
struct DlvParams {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  double reaction_u(double u, double v) const { return u * (a1 + b1 * u + c1 * v); }
  double reaction_v(double u, double v) const { return v * (a2 + b2 * u + c2 * v); }

  friend bool operator==(const DlvParams&, const DlvParams&) = default;
};

struct Violation {
  std::string name;
  std::string detail;
};

struct ValidationOptions {
  // Negative lambda flips parabolicity; rejected unless explicitly allowed.
  bool allow_nonphysical = false;
};

inline std::vector<Violation> validate_params(const DlvParams& p, ValidationOptions opts = {}) {
  std::vector<Violation> out;
  if (!opts.allow_nonphysical) {
    if (!(p.lambda1 > 0.0)) out.push_back({"lambda1 positive", "lambda1 must be > 0"});
    if (!(p.lambda2 > 0.0)) out.push_back({"lambda2 positive", "lambda2 must be > 0"});
  }
  if (p.b1 == 0.0 && p.b2 == 0.0 && p.c1 == 0.0 && p.c2 == 0.0) {
    out.push_back({"linear system", "all interaction coefficients b1, b2, c1, c2 vanish"});
  }
  if (p.b2 * p.b2 + p.c1 * p.c1 == 0.0) {
    out.push_back({"uncoupled", "b2^2 + c1^2 must be nonzero"});
  }
  return out;
}

inline double beta(double a1, double a2, double lambda1, double lambda2) {
  if (lambda1 == lambda2) throw DegenerateParameters("beta: lambda1 == lambda2");
  return (a1 - a2) / (lambda1 - lambda2);
}

// ---------------------------------------------------------------------------
// Systems. Specialised ids carry only their free parameters.

namespace system {

struct General {
  DlvParams params;
};
// lambda1 u_t = u_xx + u(a1 + u), lambda2 v_t = v_xx + u v
struct Sys36 {
  double lambda1, lambda2, a1;
};
// b = c = 1
struct Sys38 {
  double lambda1, lambda2, a1, a2;
};
// b = c = 1, a1 = a2 = a
struct Sys41 {
  double lambda1, lambda2, a;
};
// b = c = 1, a1 = a lambda1, a2 = a lambda2
struct Sys43 {
  double lambda1, lambda2, a;
};
// Competition form: b1 = b2 = -b, c1 = c2 = -c, fields are (U, V).
struct Sys136 {
  double lambda1, lambda2, a1, a2, b, c;
};

}  // namespace system

using SystemId = std::variant<system::General, system::Sys36, system::Sys38, system::Sys41, system::Sys43,
                              system::Sys136>;

inline std::string system_name(const SystemId& id) {
  static const char* names[] = {"general", "sys36", "sys38", "sys41", "sys43", "sys136"};
  return names[id.index()];
}

inline DlvParams expand(const SystemId& id) {
  struct Visitor {
    DlvParams operator()(const system::General& s) const { return s.params; }
    DlvParams operator()(const system::Sys36& s) const { return {s.lambda1, s.lambda2, s.a1, 0.0, 1.0, 1.0, 0.0, 0.0}; }
    DlvParams operator()(const system::Sys38& s) const { return {s.lambda1, s.lambda2, s.a1, s.a2, 1.0, 1.0, 1.0, 1.0}; }
    DlvParams operator()(const system::Sys41& s) const { return {s.lambda1, s.lambda2, s.a, s.a, 1.0, 1.0, 1.0, 1.0}; }
    DlvParams operator()(const system::Sys43& s) const {
      return {s.lambda1, s.lambda2, s.a * s.lambda1, s.a * s.lambda2, 1.0, 1.0, 1.0, 1.0};
    }
    DlvParams operator()(const system::Sys136& s) const {
      return {s.lambda1, s.lambda2, s.a1, s.a2, -s.b, -s.b, -s.c, -s.c};
    }
  };
  return std::visit(Visitor{}, id);
}

// Named free parameters of a system, as expression bindings.
inline sym::Bindings system_bindings(const SystemId& id) {
  struct Visitor {
    sym::Bindings operator()(const system::General& s) const {
      const auto& p = s.params;
      return {{"lambda1", p.lambda1}, {"lambda2", p.lambda2}, {"a1", p.a1}, {"a2", p.a2},
              {"b1", p.b1},           {"b2", p.b2},           {"c1", p.c1}, {"c2", p.c2}};
    }
    sym::Bindings operator()(const system::Sys36& s) const {
      return {{"lambda1", s.lambda1}, {"lambda2", s.lambda2}, {"a1", s.a1}};
    }
    sym::Bindings operator()(const system::Sys38& s) const {
      return {{"lambda1", s.lambda1}, {"lambda2", s.lambda2}, {"a1", s.a1}, {"a2", s.a2}};
    }
    sym::Bindings operator()(const system::Sys41& s) const {
      return {{"lambda1", s.lambda1}, {"lambda2", s.lambda2}, {"a", s.a}};
    }
    sym::Bindings operator()(const system::Sys43& s) const {
      return {{"lambda1", s.lambda1}, {"lambda2", s.lambda2}, {"a", s.a}};
    }
    sym::Bindings operator()(const system::Sys136& s) const {
      return {{"lambda1", s.lambda1}, {"lambda2", s.lambda2}, {"a1", s.a1}, {"a2", s.a2}, {"b", s.b}, {"c", s.c}};
    }
  };
  return std::visit(Visitor{}, id);
}

namespace detail {

inline double require(const sym::Bindings& b, const char* key, const std::string& sys) {
  const auto it = b.find(key);
  if (it == b.end()) throw ConfigError("system " + sys + " needs parameter '" + key + "'");
  return it->second;
}

}  // namespace detail

// Builds a system id from its name and a parameter map (keys as in
// system_bindings). Missing keys are reported; extra keys are ignored.
inline SystemId make_system(const std::string& name, const sym::Bindings& p) {
  using detail::require;
  const auto l1 = [&] { return require(p, "lambda1", name); };
  const auto l2 = [&] { return require(p, "lambda2", name); };
  if (name == "sys36") return system::Sys36{l1(), l2(), require(p, "a1", name)};
  if (name == "sys38") return system::Sys38{l1(), l2(), require(p, "a1", name), require(p, "a2", name)};
  if (name == "sys41") return system::Sys41{l1(), l2(), require(p, "a", name)};
  if (name == "sys43") return system::Sys43{l1(), l2(), require(p, "a", name)};
  if (name == "sys136") {
    return system::Sys136{l1(), l2(), require(p, "a1", name), require(p, "a2", name), require(p, "b", name),
                          require(p, "c", name)};
  }
  if (name == "general") {
    DlvParams d;
    d.lambda1 = l1();
    d.lambda2 = l2();
    const auto opt = [&](const char* k) {
      const auto it = p.find(k);
      return it == p.end() ? 0.0 : it->second;
    };
    d.a1 = opt("a1");
    d.a2 = opt("a2");
    d.b1 = opt("b1");
    d.b2 = opt("b2");
    d.c1 = opt("c1");
    d.c2 = opt("c2");
    return system::General{d};
  }
  throw ConfigError("unknown system '" + name + "'");
}

// ---------------------------------------------------------------------------
// Grids

struct GridSpec {
  double t0 = 0.0;
  double t1 = 1.0;
  double x0 = 0.0;
  double x1 = 1.0;
  int nt = 2;
  int nx = 3;

  void validate() const {
    if (!(t1 > t0)) throw ConfigError("grid: t1 must exceed t0");
    if (!(x1 > x0)) throw ConfigError("grid: x1 must exceed x0");
    if (nt < 2) throw ConfigError("grid: nt must be >= 2");
    if (nx < 3) throw ConfigError("grid: nx must be >= 3");
  }

  double dt() const { return (t1 - t0) / (nt - 1); }
  double dx() const { return (x1 - x0) / (nx - 1); }
  double t(int i) const { return i == nt - 1 ? t1 : t0 + i * dt(); }
  double x(int j) const { return j == nx - 1 ? x1 : x0 + j * dx(); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Row-major nt x nx samples of (u, v).
struct GridField {
  GridSpec spec;
  std::vector<double> u;
  std::vector<double> v;

  GridField() = default;
  explicit GridField(const GridSpec& s)
      : spec(s), u(static_cast<std::size_t>(s.nt) * s.nx, 0.0), v(static_cast<std::size_t>(s.nt) * s.nx, 0.0) {}

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * spec.nx + j; }
  double& u_at(int i, int j) { return u[index(i, j)]; }
  double& v_at(int i, int j) { return v[index(i, j)]; }
  double u_at(int i, int j) const { return u[index(i, j)]; }
  double v_at(int i, int j) const { return v[index(i, j)]; }

  bool consistent() const {
    const auto n = static_cast<std::size_t>(spec.nt) * spec.nx;
    if (u.size() != n || v.size() != n) return false;
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(u[k]) || !std::isfinite(v[k])) return false;
    }
    return true;
  }
};

// Values and first/second derivatives of a field pair at one point.
struct FieldJet {
  double u = 0.0, v = 0.0;
  double u_t = 0.0, v_t = 0.0;
  double u_x = 0.0, v_x = 0.0;
  double u_xx = 0.0, v_xx = 0.0;
};

// ---------------------------------------------------------------------------
// Scenario configuration
//
// Line-oriented `key = value` text; `#` starts a comment. Keys:
//   system, params.<name>, grid.{t0,t1,x0,x1,nt,nx}, family,
//   family_params.<name>, bc, scheme, dt

using ConfigMap = std::map<std::string, std::string, std::less<>>;

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = value;
  }
  return out;
}

inline double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(what + ": not a number: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError(what + ": not a number: '" + s + "'");
  return v;
}

struct Scenario {
  std::string system_name = "sys38";
  sym::Bindings params;
  GridSpec grid;
  std::string family;
  sym::Bindings family_params;
  std::string bc = "from_exact";
  std::string scheme = "imex_cn";
  double dt = 0.0;  // 0 selects the automatic step

  SystemId system() const { return make_system(system_name, params); }

  // System parameters merged with family parameters.
  sym::Bindings all_params() const {
    sym::Bindings out = params;
    for (const auto& [k, v] : family_params) out[k] = v;
    return out;
  }
};

inline Scenario scenario_from_config(const ConfigMap& cfg) {
  Scenario s;
  bool saw_grid = false;
  for (const auto& [key, value] : cfg) {
    if (key == "system") {
      s.system_name = value;
    } else if (key == "family") {
      s.family = value;
    } else if (key == "bc") {
      s.bc = value;
    } else if (key == "scheme") {
      s.scheme = value;
    } else if (key == "dt") {
      s.dt = value == "auto" ? 0.0 : parse_number(value, key);
    } else if (key.rfind("params.", 0) == 0) {
      s.params[key.substr(7)] = parse_number(value, key);
    } else if (key.rfind("family_params.", 0) == 0) {
      s.family_params[key.substr(14)] = parse_number(value, key);
    } else if (key.rfind("grid.", 0) == 0) {
      saw_grid = true;
      const std::string f = key.substr(5);
      const double v = parse_number(value, key);
      if (f == "t0") {
        s.grid.t0 = v;
      } else if (f == "t1") {
        s.grid.t1 = v;
      } else if (f == "x0") {
        s.grid.x0 = v;
      } else if (f == "x1") {
        s.grid.x1 = v;
      } else if (f == "nt") {
        s.grid.nt = static_cast<int>(v);
      } else if (f == "nx") {
        s.grid.nx = static_cast<int>(v);
      } else {
        throw ConfigError("unknown grid key '" + key + "'");
      }
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (saw_grid) s.grid.validate();
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_config(parse_config_text(ss.str()));
}

}  // namespace dlv

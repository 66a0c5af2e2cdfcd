#pragma once

// dlvtool command-line front end. Exit codes: 0 pass/success, 1 verification
// failure, 2 usage or configuration error.

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dlv/pde.hpp"
#include "dlv/solutions.hpp"
#include "dlv/symmetry.hpp"
#include "dlv/verify.hpp"

namespace dlv::cli {

enum ExitCode { kOk = 0, kFail = 1, kUsage = 2 };

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// key=value pairs from repeated --set flags override config entries.
inline ConfigMap load_config(const std::string& path, const std::vector<std::string>& sets) {
  ConfigMap cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = parse_config_text(ss.str());
  }
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    cfg[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
  }
  return cfg;
}

inline bool has_grid(const ConfigMap& cfg) {
  for (const auto& [k, v] : cfg) {
    if (k.rfind("grid.", 0) == 0) return true;
  }
  return false;
}

inline std::pair<std::string, double> parse_perturb(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw ConfigError("--perturb expects name=rel, got '" + s + "'");
  return {s.substr(0, eq), parse_number(s.substr(eq + 1), "--perturb")};
}

inline std::vector<double> parse_list(const std::string& s, std::size_t n, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(trim(item), what));
  if (out.size() != n) throw ConfigError(what + ": expected " + std::to_string(n) + " comma-separated numbers");
  return out;
}

// Runs job(i) for i in [0, n) on up to `jobs` threads; results are collected
// by index so output order never depends on scheduling.
template <class R>
std::vector<R> parallel_map(int n, int jobs, const std::function<R(int)>& job) {
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        out[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min(jobs, n));
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

inline std::pair<std::string, std::string> field_names(const std::string& family, const std::string& system) {
  if (system == "sys136") return {"U", "V"};
  if (!family.empty() && find_family(family).semantics == FieldSemantics::CompetitionUV) return {"U", "V"};
  return {"u", "v"};
}

inline void write_plot_script(const std::string& csv, const std::string& path, const std::string& un,
                              const std::string& vn) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  os << "# gnuplot script: surfaces of " << un << "(t,x) and " << vn << "(t,x)\n"
     << "set datafile separator ','\n"
     << "set terminal pngcairo size 1200,500\n"
     << "set output '" << csv << ".png'\n"
     << "set multiplot layout 1,2\n"
     << "set xlabel 't'\nset ylabel 'x'\nset view 60,30\nunset key\n"
     << "set title '" << un << "'\n"
     << "splot '" << csv << "' every ::1 using 1:2:3 with points pointtype 7 pointsize 0.2 palette\n"
     << "set title '" << vn << "'\n"
     << "splot '" << csv << "' every ::1 using 1:2:4 with points pointtype 7 pointsize 0.2 palette\n"
     << "unset multiplot\n";
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  return os;
}

}  // namespace detail

struct Options {
  int jobs = 1;
  std::string config;
  std::vector<std::string> sets;
  std::string family, op, system, out, row, ics, perturb;
  double t0 = 0.0, x0 = 0.0;
  double tol = -1.0;
  double horizon = -1.0;
  double w0 = NAN, w1 = NAN;
  int steps = 400;
  int stride = 1;
  int draws = 0;
  int samples = sym::kIdentitySamples;
  std::uint64_t seed = 0;
  bool emit_plot = false;
  bool operators = false;
  // check-operator host and constants
  double a1 = NAN, a2 = NAN, l1 = NAN, l2 = NAN, a = NAN, b = NAN, c = NAN;
  double alpha = NAN, alpha1 = NAN, alpha2 = NAN, alpha3 = NAN, alpha4 = NAN;
};

// ---------------------------------------------------------------------------
// Commands

inline int cmd_list(const Options& o, std::ostream& out) {
  if (o.operators) {
    for (const auto id : kAllOperators) {
      out << operator_name(id) << "  host=" << host_system_name(id) << (is_first_type(id) ? "  first-type" : "")
          << '\n';
    }
    return kOk;
  }
  for (const auto& f : catalog()) {
    out << f.id << "  host=" << f.host << "  operator=" << operator_name(f.generator) << "  constraints:";
    for (std::size_t k = 0; k < f.constraints.size(); ++k) out << (k ? "; " : " ") << f.constraints[k].detail;
    if (f.singularity_text != "none") out << "  poles: " << f.singularity_text;
    out << '\n';
  }
  return kOk;
}

inline int cmd_eval(const Options& o, std::ostream& out) {
  const ConfigMap cfg = detail::load_config(o.config, o.sets);
  Scenario sc = scenario_from_config(cfg);
  if (!o.family.empty()) sc.family = o.family;
  if (sc.family.empty()) throw ConfigError("eval needs --family or a family in the config");
  const auto params = sc.all_params();
  require_constraints(sc.family, check_constraints(sc.family, params).violations);
  const GridSpec g = detail::has_grid(cfg) ? sc.grid : window_grid(sc.family, params);
  const SolutionEvaluator ev(sc.family, params, o.t0, o.x0);
  GridField f(g);
  for (int i = 0; i < g.nt; ++i) {
    for (int j = 0; j < g.nx; ++j) {
      try {
        std::tie(f.u_at(i, j), f.v_at(i, j)) = ev.value(g.t(i), g.x(j));
      } catch (const sym::EvalError&) {
        f.u_at(i, j) = f.v_at(i, j) = NAN;
      }
    }
  }
  const auto [un, vn] = detail::field_names(sc.family, find_family(sc.family).host);
  if (o.out.empty()) {
    write_field_csv(out, f, un, vn);
  } else {
    auto os = detail::open_out(o.out);
    write_field_csv(os, f, un, vn);
    out << "wrote " << o.out << " (" << g.nt * g.nx << " rows)\n";
  }
  return kOk;
}

inline int cmd_residual(const Options& o, std::ostream& out) {
  const double tol = o.tol > 0 ? o.tol : sym::kIdentityTolerance;
  const auto one = [&](const std::string& id, const sym::Bindings& p, const GridSpec& g) {
    DlvParams target = expand(family_system(id, p));
    if (!o.perturb.empty()) {
      const auto [name, rel] = detail::parse_perturb(o.perturb);
      target = perturb(target, name, rel);
    }
    return pde_residual_field(id, p, g, target, tol);
  };
  if (o.draws > 0) {
    if (o.family.empty()) throw ConfigError("residual --draws needs --family");
    find_family(o.family);
    const auto reports = detail::parallel_map<ResidualReport>(o.draws, o.jobs, [&](int k) {
      Rng rng(o.seed + static_cast<std::uint64_t>(k));
      const auto p = random_family_params(o.family, rng);
      return one(o.family, p, window_grid(o.family, p));
    });
    bool ok = true;
    for (int k = 0; k < o.draws; ++k) {
      out << "draw " << k << ": max_resid=" << detail::fmt("%.6e", reports[k].max()) << " excluded="
          << reports[k].excluded << (reports[k].pass ? " pass" : " fail") << '\n';
      ok = ok && reports[k].pass;
    }
    out << "result: " << (ok ? "pass" : "fail") << '\n';
    return ok ? kOk : kFail;
  }
  const ConfigMap cfg = detail::load_config(o.config, o.sets);
  Scenario sc = scenario_from_config(cfg);
  if (!o.family.empty()) sc.family = o.family;
  if (sc.family.empty()) throw ConfigError("residual needs --family or a family in the config");
  const auto p = sc.all_params();
  require_constraints(sc.family, check_constraints(sc.family, p).violations);
  const GridSpec g = detail::has_grid(cfg) ? sc.grid : window_grid(sc.family, p);
  const auto r = one(sc.family, p, g);
  out << "family: " << sc.family << '\n' << r.to_text();
  return r.pass ? kOk : kFail;
}

inline OperatorSpec operator_from_flags(const Options& o) {
  OperatorSpec s;
  s.id = parse_operator_id(o.op);
  const std::string host = o.system.empty() ? host_system_name(s.id) : o.system;
  sym::Bindings b;
  const std::pair<const char*, double> host_flags[] = {{"lambda1", o.l1}, {"lambda2", o.l2}, {"a1", o.a1},
                                                       {"a2", o.a2},      {"a", o.a},        {"b", o.b},
                                                       {"c", o.c}};
  for (const auto& [k, v] : host_flags) {
    if (!std::isnan(v)) b[k] = v;
  }
  s.host = make_system(host, b);
  const std::pair<double*, double> consts[] = {{&s.k.alpha, o.alpha},   {&s.k.alpha1, o.alpha1},
                                               {&s.k.alpha2, o.alpha2}, {&s.k.alpha3, o.alpha3},
                                               {&s.k.alpha4, o.alpha4}};
  for (const auto& [slot, v] : consts) {
    if (!std::isnan(v)) *slot = v;
  }
  return s;
}

inline int cmd_check_operator(const Options& o, std::ostream& out) {
  if (o.op.empty()) throw ConfigError("check-operator needs --op");
  const OperatorId id = parse_operator_id(o.op);
  const auto target_of = [&](const OperatorSpec& s) {
    DlvParams t = expand(s.host);
    if (!o.perturb.empty()) {
      const auto [name, rel] = detail::parse_perturb(o.perturb);
      t = perturb(t, name, rel);
    }
    return t;
  };
  SampleBox box;
  box.samples = o.samples;
  box.seed = o.seed;
  if (o.tol > 0) box.tolerance = o.tol;
  if (o.draws > 0) {
    const auto reports = detail::parallel_map<DetReport>(o.draws, o.jobs, [&](int k) {
      Rng rng(o.seed + static_cast<std::uint64_t>(k));
      const OperatorSpec s = random_admissible(id, rng);
      SampleBox bk = box;
      bk.seed = o.seed + static_cast<std::uint64_t>(k);
      return check_operator(s, target_of(s), bk);
    });
    bool ok = true;
    for (int k = 0; k < o.draws; ++k) {
      out << "draw " << k << ": worst=" << detail::fmt("%.6e", reports[k].worst())
          << (reports[k].pass ? " pass" : " fail") << '\n';
      ok = ok && reports[k].pass;
    }
    out << "result: " << (ok ? "pass" : "fail") << '\n';
    return ok ? kOk : kFail;
  }
  const OperatorSpec s = operator_from_flags(o);
  const DetReport r = check_operator(s, target_of(s), box);
  out << "operator: " << operator_name(s.id) << "\nsystem: " << system_name(s.host) << '\n' << r.to_text();
  return r.pass ? kOk : kFail;
}

inline int cmd_surface_check(const Options& o, std::ostream& out) {
  const double tol = o.tol > 0 ? o.tol : sym::kIdentityTolerance;
  const auto one = [&](const std::string& id, const sym::Bindings& p, const GridSpec& g) {
    OperatorSpec s = generating_operator(id, p);
    if (!o.op.empty()) s.id = parse_operator_id(o.op);
    auto ev = std::make_shared<const SolutionEvaluator>(id, p);
    return invariant_surface_residual(make_operator(s), [ev](double t, double x) { return ev->jet(t, x); }, g);
  };
  const auto line = [&](const SurfaceReport& r) {
    return "max_qu=" + detail::fmt("%.6e", r.max_qu) + " max_qv=" + detail::fmt("%.6e", r.max_qv) +
           " evaluated=" + std::to_string(r.evaluated) + " excluded=" + std::to_string(r.excluded);
  };
  const auto passes = [&](const SurfaceReport& r) {
    return r.evaluated > 0 && r.max_qu <= tol && r.max_qv <= tol &&
           r.excluded <= kMaxExcludedFraction * (r.evaluated + r.excluded);
  };
  if (o.family.empty()) throw ConfigError("surface-check needs --family");
  if (o.draws > 0) {
    const auto reports = detail::parallel_map<SurfaceReport>(o.draws, o.jobs, [&](int k) {
      Rng rng(o.seed + static_cast<std::uint64_t>(k));
      const auto p = random_family_params(o.family, rng);
      return one(o.family, p, window_grid(o.family, p));
    });
    bool ok = true;
    for (int k = 0; k < o.draws; ++k) {
      out << "draw " << k << ": " << line(reports[k]) << (passes(reports[k]) ? " pass" : " fail") << '\n';
      ok = ok && passes(reports[k]);
    }
    out << "result: " << (ok ? "pass" : "fail") << '\n';
    return ok ? kOk : kFail;
  }
  const ConfigMap cfg = detail::load_config(o.config, o.sets);
  const Scenario sc = scenario_from_config(cfg);
  const auto p = sc.all_params();
  require_constraints(o.family, check_constraints(o.family, p).violations);
  const GridSpec g = detail::has_grid(cfg) ? sc.grid : window_grid(o.family, p);
  const auto r = one(o.family, p, g);
  out << "family: " << o.family << '\n' << line(r) << "\nresult: " << (passes(r) ? "pass" : "fail") << '\n';
  return passes(r) ? kOk : kFail;
}

inline int cmd_reduce(const Options& o, std::ostream& out) {
  if (o.row.empty()) throw ConfigError("reduce needs --row");
  const std::string row = std::isdigit(static_cast<unsigned char>(o.row[0])) ? "row" + o.row : o.row;
  const ConfigMap cfg = detail::load_config(o.config, o.sets);
  const Scenario sc = scenario_from_config(cfg);
  const auto ics = detail::parse_list(o.ics, 4, "--ics");
  const double w0 = std::isnan(o.w0) ? sc.grid.x0 : o.w0;
  const double w1 = std::isnan(o.w1) ? sc.grid.x1 : o.w1;
  const double tol = o.tol > 0 ? o.tol : 1e-6;
  const auto r = reduction_consistency(row, sc.all_params(), w0, w1, {ics[0], ics[1], ics[2], ics[3]}, sc.grid.t0,
                                       sc.grid.t1, o.steps);
  if (!o.out.empty()) {
    auto os = detail::open_out(o.out);
    os << "w,phi1,dphi1,phi2,dphi2\n";
    char buf[160];
    for (std::size_t k = 0; k < r.profiles.x.size(); ++k) {
      const auto& s = r.profiles.state[k];
      std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.12e,%.12e\n", r.profiles.x[k], s.p1, s.d1, s.p2, s.d2);
      os << buf;
    }
  }
  out << "row: " << row << '\n';
  if (r.blown_up) {
    out << "ode blow-up at w=" << detail::fmt("%.6e", r.last_valid_w) << "\nresult: fail\n";
    return kFail;
  }
  const bool ok = r.max_resid <= tol;
  out << "max_resid=" << detail::fmt("%.6e", r.max_resid) << " points=" << r.points << "\nresult: "
      << (ok ? "pass" : "fail") << '\n';
  return ok ? kOk : kFail;
}

inline int cmd_simulate(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw ConfigError("simulate needs --out");
  const Scenario sc = scenario_from_config(detail::load_config(o.config, o.sets));
  const SimulationSetup setup = setup_from_scenario(sc);
  const Trajectory tr = run(setup);
  const auto [un, vn] = detail::field_names(setup.family, sc.system_name);
  {
    auto os = detail::open_out(o.out);
    write_field_csv(os, tr.field, un, vn, o.stride);
  }
  if (o.emit_plot) detail::write_plot_script(o.out, o.out + ".gp", un, vn);
  out << "scheme: " << scheme_name(setup.scheme.kind) << "\ndt: " << detail::fmt("%.6e", tr.dt)
      << "\nsteps: " << tr.steps << '\n';
  for (const auto& l : tr.log) out << "note: " << l << '\n';
  if (tr.terminated) {
    out << "terminated early at t=" << detail::fmt("%.6e", tr.last_valid_t) << '\n';
    return kFail;
  }
  return kOk;
}

inline int cmd_compare(const Options& o, std::ostream& out) {
  const Scenario sc = scenario_from_config(detail::load_config(o.config, o.sets));
  const SimulationSetup setup = setup_from_scenario(sc);
  const Trajectory tr = run(setup);
  const double tol = o.tol > 0 ? o.tol : kSimulationTolerance;
  if (tr.terminated) {
    out << "terminated early at t=" << detail::fmt("%.6e", tr.last_valid_t) << "\nresult: fail\n";
    return kFail;
  }
  const ErrorNorms n = compare_fields(tr.field, sample_family(setup.family, setup.family_params, setup.grid));
  if (!o.out.empty()) {
    auto os = detail::open_out(o.out);
    os << "t,linf,l2\n";
    char buf[128];
    for (std::size_t i = 0; i < n.t.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e\n", n.t[i], n.linf[i], n.l2[i]);
      os << buf;
    }
  }
  const bool ok = n.linf.back() <= tol;
  out << "family: " << setup.family << "\nlinf_final=" << detail::fmt("%.6e", n.linf.back())
      << "\nlinf_max=" << detail::fmt("%.6e", n.max_linf()) << "\nl2_final=" << detail::fmt("%.6e", n.l2.back())
      << "\nresult: " << (ok ? "pass" : "fail") << '\n';
  return ok ? kOk : kFail;
}

inline int cmd_bvp(const Options& o, std::ostream& out) {
  const ConfigMap cfg = detail::load_config(o.config, o.sets);
  const Scenario sc = scenario_from_config(cfg);
  const SystemId sys = sc.system();
  const auto* s = std::get_if<system::Sys136>(&sys);
  if (s == nullptr) throw ConfigError("bvp needs system sys136");
  const auto all = sc.all_params();
  const auto c2 = all.find("C2");
  if (c2 == all.end()) throw ConfigError("bvp needs family_params.C2");
  const double horizon = o.horizon > 0 ? o.horizon : (detail::has_grid(cfg) ? sc.grid.t1 : 40.0);
  const int nx = cfg.count("grid.nx") ? sc.grid.nx : 101;
  const int nt = cfg.count("grid.nt") ? sc.grid.nt : 201;
  SimulationSetup setup = make_bvp_theorem4(*s, c2->second, horizon, nx, nt);
  setup.scheme = {parse_scheme(sc.scheme), sc.dt};
  const Trajectory tr = run(setup);
  if (tr.terminated) {
    out << "terminated early at t=" << detail::fmt("%.6e", tr.last_valid_t) << "\nresult: fail\n";
    return kFail;
  }
  const double be = beta(s->a1, s->a2, s->lambda1, s->lambda2);
  const double u_star = s->a1 / s->b;
  const double amp_u = std::fabs(c2->second / ((s->a1 - s->a2) * s->b));
  const double amp_v = std::fabs(c2->second / ((s->a2 - s->a1) * s->c));
  const AsymptoticReport r = asymptotic_report(tr, {u_star, 0.0});
  if (!o.out.empty()) {
    auto os = detail::open_out(o.out);
    os << r.to_text();
  }
  bool envelope = true;
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    if (r.dev_u[i] > 1.05 * amp_u * std::exp(be * r.t[i]) + kSimulationTolerance) envelope = false;
  }
  const bool final_v = r.dev_v.back() <= 1.05 * amp_v * std::exp(be * horizon);
  const bool rate = std::fabs(r.rate - be) <= 0.1 * std::fabs(be);
  out << "beta=" << detail::fmt("%.6e", be) << "\ndomain=[0, " << detail::fmt("%.6e", setup.grid.x1) << "]\n"
      << "steady=(" << detail::fmt("%.6e", u_star) << ", 0)\n"
      << "sup_dev_u_final=" << detail::fmt("%.6e", r.dev_u.back()) << "\nsup_dev_v_final="
      << detail::fmt("%.6e", r.dev_v.back()) << "\nfitted_rate=" << detail::fmt("%.6e", r.rate) << '\n'
      << "envelope: " << (envelope ? "pass" : "fail") << "\nfinal_v: " << (final_v ? "pass" : "fail")
      << "\nrate: " << (rate ? "pass" : "fail") << '\n';
  const bool ok = envelope && final_v && rate;
  out << "result: " << (ok ? "pass" : "fail") << '\n';
  return ok ? kOk : kFail;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Symmetry checks and exact solutions for the diffusive Lotka-Volterra system",
               "dlvtool"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--jobs", o.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);

  const auto config_opts = [&](CLI::App* c) {
    c->add_option("--config", o.config, "Scenario file (key = value)");
    c->add_option("--set", o.sets, "Override a config key, key=value")->take_all();
  };
  const auto sweep_opts = [&](CLI::App* c) {
    c->add_option("--draws", o.draws, "Random admissible draws instead of the config parameters");
    c->add_option("--seed", o.seed, "Seed for sampling and draws");
  };

  auto* list = app.add_subcommand("list", "Catalog of exact solution families");
  list->add_flag("--operators", o.operators, "List operators instead");

  auto* eval = app.add_subcommand("eval", "Evaluate a family on a grid");
  config_opts(eval);
  eval->add_option("--family", o.family);
  eval->add_option("--out", o.out, "CSV path (stdout if omitted)");
  eval->add_option("--t0", o.t0, "Time shift");
  eval->add_option("--x0", o.x0, "Space shift");

  auto* residual = app.add_subcommand("residual", "Analytic PDE residual of a family");
  config_opts(residual);
  sweep_opts(residual);
  residual->add_option("--family", o.family);
  residual->add_option("--tol", o.tol);
  residual->add_option("--perturb", o.perturb, "name=rel, perturb a system coefficient");

  auto* check = app.add_subcommand("check-operator", "Determining equations for an operator");
  sweep_opts(check);
  check->add_option("--op", o.op)->required();
  check->add_option("--system", o.system);
  check->add_option("--l1", o.l1);
  check->add_option("--l2", o.l2);
  check->add_option("--a1", o.a1);
  check->add_option("--a2", o.a2);
  check->add_option("--a", o.a);
  check->add_option("--b", o.b);
  check->add_option("--c", o.c);
  check->add_option("--alpha", o.alpha);
  check->add_option("--alpha1", o.alpha1);
  check->add_option("--alpha2", o.alpha2);
  check->add_option("--alpha3", o.alpha3);
  check->add_option("--alpha4", o.alpha4);
  check->add_option("--samples", o.samples)->check(CLI::PositiveNumber);
  check->add_option("--tol", o.tol);
  check->add_option("--perturb", o.perturb, "name=rel, perturb a system coefficient");

  auto* surface = app.add_subcommand("surface-check", "Invariant-surface conditions of a family");
  config_opts(surface);
  sweep_opts(surface);
  surface->add_option("--family", o.family)->required();
  surface->add_option("--op", o.op, "Operator (default: the family's generator)");
  surface->add_option("--tol", o.tol);

  auto* reduce = app.add_subcommand("reduce", "Integrate a reduced ODE system and check the ansatz");
  config_opts(reduce);
  reduce->add_option("--row", o.row)->required();
  reduce->add_option("--ics", o.ics, "phi1,phi1',phi2,phi2' at the window start")->required();
  reduce->add_option("--out", o.out);
  reduce->add_option("--w0", o.w0);
  reduce->add_option("--w1", o.w1);
  reduce->add_option("--steps", o.steps)->check(CLI::PositiveNumber);
  reduce->add_option("--tol", o.tol);

  auto* simulate = app.add_subcommand("simulate", "Simulate a scenario");
  config_opts(simulate);
  simulate->add_option("--out", o.out, "CSV path")->required();
  simulate->add_option("--stride", o.stride, "Write every n-th time slice")->check(CLI::PositiveNumber);
  simulate->add_flag("--emit-plot", o.emit_plot, "Also write a gnuplot script next to the CSV");

  auto* compare = app.add_subcommand("compare", "Simulation against the exact family");
  config_opts(compare);
  compare->add_option("--out", o.out, "CSV of per-slice norms");
  compare->add_option("--tol", o.tol);

  auto* bvp = app.add_subcommand("bvp", "Competition BVP with decay report");
  config_opts(bvp);
  bvp->add_option("--horizon", o.horizon);
  bvp->add_option("--out", o.out, "CSV of the decay table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*list) return cmd_list(o, out);
    if (*eval) return cmd_eval(o, out);
    if (*residual) return cmd_residual(o, out);
    if (*check) return cmd_check_operator(o, out);
    if (*surface) return cmd_surface_check(o, out);
    if (*reduce) return cmd_reduce(o, out);
    if (*simulate) return cmd_simulate(o, out);
    if (*compare) return cmd_compare(o, out);
    if (*bvp) return cmd_bvp(o, out);
  } catch (const OperatorConstraintError& e) {
    err << "error: " << e.what() << '\n';
    for (const auto& v : e.violations()) err << "  violated: " << v << '\n';
    return kUsage;
  } catch (const ConstraintError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"dlvtool"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace dlv::cli

#include <gtest/gtest.h>

#include <cmath>

#include "dlv/verify.hpp"

using namespace dlv;

// ---------------------------------------------------------------------------
// Residuals

TEST(Residual, EveryFamilyTenDraws) {
  Rng rng(2024);
  for (const auto& f : catalog()) {
    double worst = 0.0;
    for (int draw = 0; draw < 10; ++draw) {
      const auto p = random_family_params(f.id, rng);
      const auto r = pde_residual_field(f.id, p, window_grid(f.id, p));
      EXPECT_TRUE(r.pass) << f.id << " draw " << draw << "\n" << r.to_text();
      EXPECT_EQ(r.excluded, 0) << f.id;
      worst = std::max(worst, r.max());
    }
    EXPECT_LE(worst, 1e-9) << f.id;
  }
}

TEST(Residual, PerturbedHostFails) {
  const sym::Bindings p{{"lambda1", 3}, {"lambda2", 1}, {"a1", 2}, {"a2", 1}, {"C1", 0.4}, {"C2", -0.3}};
  DlvParams target = expand(family_system("eq106", p));
  target.a1 *= 1.01;
  const auto r = pde_residual_field("eq106", p, window_grid("eq106", p), target);
  EXPECT_FALSE(r.pass);
  EXPECT_GE(r.max(), 1e-3);
}

TEST(Residual, ConstantStateIsExact) {
  const DlvParams p = expand(system::Sys38{2, 1, 1.3, 0.2});
  const auto r = residual_report([](double, double) { return FieldJet{-1.3, 0, 0, 0, 0, 0, 0, 0}; }, p,
                                 GridSpec{0, 1, 0, 1, 10, 10});
  EXPECT_EQ(r.max(), 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(Residual, PolesAreExcludedAndFlagged) {
  const sym::Bindings p{{"lambda1", 1.8}, {"lambda2", 1}, {"a1", 2}, {"a2", 1}};
  // window straddles the coth pole at x = 0: 7 of 50 columns fall inside the radius
  const auto r = pde_residual_field("eq119", p, GridSpec{0, 0.5, -1, 1, 50, 50});
  EXPECT_GT(r.excluded, 0);
  EXPECT_TRUE(r.unreliable);
  EXPECT_FALSE(r.pass);
  EXPECT_NE(r.to_text().find("unreliable"), std::string::npos);
  // a narrower radius in cells still excludes the pole itself
  const auto ok = pde_residual_field("eq119", p, GridSpec{0, 0.5, -1, 1, 50, 500});
  EXPECT_LE(ok.max(), 1e-6);
}

TEST(Residual, TranslationCovariance) {
  Rng rng(8);
  for (const auto& f : catalog()) {
    const auto p = random_family_params(f.id, rng);
    auto ev = std::make_shared<const SolutionEvaluator>(f.id, p, 0.2, -0.1);
    const GridSpec g = window_grid(f.id, p, 20);
    // the shifted poles move with x0
    std::vector<Singularity> loci = singular_loci(f, p);
    for (auto& s : loci) s.x0 -= 0.1;
    const auto r = residual_report([ev](double t, double x) { return ev->jet(t, x); },
                                   expand(family_system(f.id, p)), g, loci);
    EXPECT_LE(r.max(), 1e-9) << f.id;
  }
}

// (u, v) solves the system with (b1, c1, b2, c2) iff (u/s, v/r) solves it
// with (s b1, r c1, s b2, r c2).
TEST(Residual, ScalingCovariance) {
  Rng rng(13);
  for (const char* id : {"eq106", "eq116", "eq127"}) {
    const auto p = random_family_params(id, rng);
    auto ev = std::make_shared<const SolutionEvaluator>(id, p);
    for (const auto& [s, r] : {std::pair{2.0, -0.5}, std::pair{-0.1, 0.1}}) {
      DlvParams q = expand(family_system(id, p));
      q.b1 *= s;
      q.b2 *= s;
      q.c1 *= r;
      q.c2 *= r;
      const auto jet = [ev, s, r](double t, double x) {
        FieldJet j = ev->jet(t, x);
        return FieldJet{j.u / s, j.v / r, j.u_t / s, j.v_t / r, j.u_x / s, j.v_x / r, j.u_xx / s, j.v_xx / r};
      };
      const auto rep = residual_report(jet, q, window_grid(id, p, 20));
      EXPECT_LE(rep.max(), 1e-9) << id << " " << s << " " << r;
    }
  }
}

// ---------------------------------------------------------------------------
// Field comparison

TEST(Compare, IdenticalAndOffsetFields) {
  GridField a(GridSpec{0, 1, 0, 2, 4, 9});
  for (std::size_t k = 0; k < a.u.size(); ++k) {
    a.u[k] = std::sin(0.3 * k);
    a.v[k] = std::cos(0.7 * k);
  }
  const auto z = compare_fields(a, a);
  for (double e : z.linf) EXPECT_EQ(e, 0.0);
  for (double e : z.l2) EXPECT_EQ(e, 0.0);
  GridField b = a;
  for (double& x : b.u) x += 1e-3;
  for (double& x : b.v) x += 1e-3;
  const auto n = compare_fields(a, b);
  ASSERT_EQ(n.linf.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(n.linf[i], 1e-3, 1e-15);
    EXPECT_LE(n.l2[i], std::sqrt(2.0) * n.linf[i] * (1 + 1e-12));
    EXPECT_NEAR(n.l2[i], std::sqrt(2.0) * 1e-3, 1e-15);
  }
  GridField c(GridSpec{0, 1, 0, 2, 4, 10});
  EXPECT_THROW(compare_fields(a, c), std::invalid_argument);
}

TEST(Compare, SimulationAgainstEq107) {
  const sym::Bindings p{{"lambda1", 11}, {"lambda2", 1}, {"a1", 1}, {"a2", 2}, {"C1", 0.3}, {"C2", 0.2}};
  Scenario sc;
  sc.system_name = "sys38";
  sc.params = {{"lambda1", 11}, {"lambda2", 1}, {"a1", 1}, {"a2", 2}};
  sc.family = "eq107";
  sc.family_params = {{"C1", 0.3}, {"C2", 0.2}};
  sc.grid = {0, 1, 0, 3, 11, 401};
  const auto tr = run(setup_from_scenario(sc));
  const auto n = compare_fields(tr.field, sample_family("eq107", p, sc.grid));
  EXPECT_EQ(n.linf.front(), 0.0);
  EXPECT_LE(n.linf.back(), 1e-3);
}

// ---------------------------------------------------------------------------
// Asymptotics

TEST(Asymptotics, CompetitionDecay) {
  const auto s = make_bvp_theorem4(system::Sys136{11, 1, 1, 2, 0.1, 0.1}, 0.2, 40.0, 101, 201);
  const auto tr = run(s);
  ASSERT_FALSE(tr.terminated);
  const auto r = asymptotic_report(tr, {10.0, 0.0});
  ASSERT_EQ(r.t.size(), 201u);
  EXPECT_LE(r.dev_v.back(), 2 * std::exp(-4.0) * 1.05);
  EXPECT_NEAR(r.rate, -0.1, 0.01);
  for (std::size_t i = 0; i < r.t.size(); ++i) EXPECT_LE(r.dev_u[i], 2.1 * std::exp(-0.1 * r.t[i]) + 1e-3);
  EXPECT_EQ(r.fit_points, 101);
}

TEST(Asymptotics, SteadyStartStaysPut) {
  auto s = make_bvp_theorem4(system::Sys136{11, 1, 1, 2, 0.1, 0.1}, 0.2, 10.0, 51, 21);
  s.init = [](double) { return std::pair{10.0, 0.0}; };
  const auto r = asymptotic_report(run(s), {10.0, 0.0});
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    EXPECT_LE(r.dev_u[i], 1e-10);
    EXPECT_LE(r.dev_v[i], 1e-10);
  }
  EXPECT_TRUE(std::isnan(r.rate));
}

// ---------------------------------------------------------------------------
// Reduction consistency

TEST(Reduction, Row2FromExponentialData) {
  const double l1 = 3, l2 = 1, a1 = 2, a2 = 1;
  const double k = std::sqrt(beta(a1, a2, l1, l2) * l1);
  const sym::Bindings p{{"lambda1", l1}, {"lambda2", l2}, {"a1", a1}, {"a2", a2}};
  const auto r = reduction_consistency("row2", p, 0, 1, {-a1, 0, 1, k});
  EXPECT_FALSE(r.blown_up);
  EXPECT_LE(r.max_resid, 1e-6);
  EXPECT_GT(r.points, 1000);
  // phi2' scaled inconsistently: the phi2 equation is linear, still a solution
  const auto s = reduction_consistency("row2", p, 0, 1, {-a1, 0, 1, 3 * k});
  EXPECT_LE(s.max_resid, 1e-6);
}

TEST(Reduction, Row7FromLinearRelationData) {
  const double l1 = 1.4, l2 = 0.8, a = -0.9;
  const sym::Bindings p{{"lambda1", l1}, {"lambda2", l2}, {"a", a}, {"alpha", 0.7}};
  const sym::Expr f1 = particular_phi_expr(PhiKind::phi122, p);
  const sym::Expr d1 = sym::diff(f1, "x");
  const auto at = [](const sym::Expr& e, double x) { return sym::eval_expr(e, {{"x", x}}); };
  const double x0 = -1.0;
  const ProfileState ics{at(f1, x0), at(d1, x0), l1 * at(f1, x0) + a * l1 * l2, l1 * at(d1, x0)};
  const auto r7 = reduction_consistency("row7", p, x0, 1.0, ics);
  EXPECT_FALSE(r7.blown_up);
  EXPECT_LE(r7.max_resid, 1e-6);
  // row 10 is where the linear relation closes: profiles track the closed form
  const auto r10 = reduction_consistency("row10", p, x0, 1.0, ics);
  EXPECT_LE(r10.max_resid, 1e-6);
  for (std::size_t i = 0; i < r10.profiles.x.size(); ++i) {
    const double x = r10.profiles.x[i];
    EXPECT_NEAR(r10.profiles.state[i].p1, at(f1, x), 1e-7);
    EXPECT_NEAR(r10.profiles.state[i].p2, l1 * at(f1, x) + a * l1 * l2, 1e-7);
  }
}

TEST(Reduction, WrongRhsIsDetected) {
  // integrate row 3's system but push the profiles through row 2's ansatz:
  // same phi2 equation, different phi1 equation
  const sym::Bindings p{{"lambda1", 3}, {"lambda2", 1}, {"a1", 2}, {"a2", 1}};
  const auto r3 = ode_integrate(reduced_rhs("row3", p), {0.5, 0.1, 1, 0.2}, 0, 1, 400);
  const BoundRow b2 = bind_row(find_row("row2"), p);
  const auto [e1, e2] = reduction_residual_exprs(b2, true);
  const auto rhs3 = reduced_rhs("row3", p);
  double worst = 0.0;
  for (std::size_t k = 0; k < r3.x.size(); k += 40) {
    const auto& s = r3.state[k];
    const auto [q1, q2] = rhs3(r3.x[k], s);
    const sym::Bindings at{{"t", 0.5}, {"x", r3.x[k]}, {"p1", s.p1}, {"d1", s.d1}, {"p2", s.p2},
                           {"d2", s.d2}, {"q1", q1},    {"q2", q2}};
    worst = std::max({worst, std::fabs(sym::eval_expr(e1, at)), std::fabs(sym::eval_expr(e2, at))});
  }
  EXPECT_GE(worst, 1e-3);
}

TEST(Reduction, Row1TravellingWave) {
  const sym::Bindings p{{"lambda1", 1.5}, {"lambda2", 0.8}, {"a1", 0.4}, {"C1", 0.3},
                        {"C2", -0.2},     {"C3", 0.5},      {"C4", 0.1}};
  const auto r = reduction_consistency("row1", p, -1, 1, {0.2, 0.1, 0.3, -0.2});
  EXPECT_FALSE(r.blown_up);
  EXPECT_LE(r.max_resid, 1e-6);
}

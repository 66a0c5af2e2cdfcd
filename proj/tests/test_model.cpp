#include <gtest/gtest.h>

#include "dlv/model.hpp"

using namespace dlv;

namespace {

bool has(const std::vector<Violation>& v, const std::string& name) {
  for (const auto& x : v) {
    if (x.name == name) return true;
  }
  return false;
}

}  // namespace

TEST(Validate, CoupledNonlinearIsOk) {
  DlvParams p{1, 2, 0, 0, 1, 1, 1, 1};
  EXPECT_TRUE(validate_params(p).empty());
}

TEST(Validate, NamesEachViolation) {
  DlvParams lin{1, 2, 1, 1, 0, 0, 0, 0};
  EXPECT_TRUE(has(validate_params(lin), "linear system"));
  DlvParams unc{1, 2, 1, 1, 1, 0, 0, 1};
  const auto v = validate_params(unc);
  EXPECT_TRUE(has(v, "uncoupled"));
  EXPECT_FALSE(has(v, "linear system"));
  DlvParams neg{-1, 2, 0, 0, 1, 1, 1, 1};
  EXPECT_TRUE(has(validate_params(neg), "lambda1 positive"));
  EXPECT_TRUE(validate_params(neg, {.allow_nonphysical = true}).empty());
}

TEST(Beta, Examples) {
  EXPECT_DOUBLE_EQ(beta(1, 2, 11, 1), -0.1);
  EXPECT_DOUBLE_EQ(beta(1.5, 1.5, 3, 1), 0.0);
  EXPECT_DOUBLE_EQ(beta(3, 1, 2, 1), 2.0);
  EXPECT_THROW(beta(1, 2, 1, 1), DegenerateParameters);
}

TEST(Systems, ExpandSpecialisations) {
  EXPECT_EQ(expand(system::Sys36{2, 1, 3}), (DlvParams{2, 1, 3, 0, 1, 1, 0, 0}));
  EXPECT_EQ(expand(system::Sys38{2, 1, 3, 4}), (DlvParams{2, 1, 3, 4, 1, 1, 1, 1}));
  EXPECT_EQ(expand(system::Sys41{2, 1, 3}), (DlvParams{2, 1, 3, 3, 1, 1, 1, 1}));
  EXPECT_EQ(expand(system::Sys43{2, 1, 3}), (DlvParams{2, 1, 6, 3, 1, 1, 1, 1}));
  EXPECT_EQ(expand(system::Sys136{11, 1, 1, 2, 0.1, 0.1}), (DlvParams{11, 1, 1, 2, -0.1, -0.1, -0.1, -0.1}));
}

TEST(Systems, ExpandedSpecialisationsValidate) {
  const SystemId ids[] = {system::Sys36{2, 1, 3}, system::Sys38{2, 1, 3, 4}, system::Sys41{2, 1, 3},
                          system::Sys43{2, 1, 3}, system::Sys136{11, 1, 1, 2, 0.1, 0.1}};
  for (const auto& id : ids) {
    const DlvParams p = expand(id);
    EXPECT_EQ(p, expand(id));
    EXPECT_TRUE(validate_params(p).empty()) << system_name(id);
    EXPECT_EQ(expand(system::General{p}), p);
  }
}

TEST(Systems, MakeFromBindingsRoundTrips) {
  const SystemId ids[] = {system::Sys36{2, 1, 3}, system::Sys38{2, 1, 3, 4}, system::Sys41{2, 1, 3},
                          system::Sys43{2, 1, 3}, system::Sys136{11, 1, 1, 2, 0.1, 0.1},
                          system::General{{1, 2, 3, 4, 5, 6, 7, 8}}};
  for (const auto& id : ids) {
    const SystemId back = make_system(system_name(id), system_bindings(id));
    EXPECT_EQ(expand(back), expand(id));
  }
  EXPECT_THROW(make_system("sys38", {{"lambda1", 1}}), ConfigError);
  EXPECT_THROW(make_system("sys99", {}), ConfigError);
}

TEST(Grid, SpecAccessorsAndValidation) {
  GridSpec g{0, 1, -1, 1, 11, 21};
  EXPECT_NO_THROW(g.validate());
  EXPECT_DOUBLE_EQ(g.dt(), 0.1);
  EXPECT_DOUBLE_EQ(g.dx(), 0.1);
  EXPECT_DOUBLE_EQ(g.x(20), 1.0);
  EXPECT_DOUBLE_EQ(g.t(10), 1.0);
  EXPECT_THROW((GridSpec{1, 0, 0, 1, 2, 3}.validate()), ConfigError);
  EXPECT_THROW((GridSpec{0, 1, 0, 1, 1, 3}.validate()), ConfigError);
  EXPECT_THROW((GridSpec{0, 1, 0, 1, 2, 2}.validate()), ConfigError);
  GridField f(g);
  EXPECT_TRUE(f.consistent());
  f.u_at(3, 4) = std::nan("");
  EXPECT_FALSE(f.consistent());
}

TEST(Config, ParsesScenario) {
  const std::string text = R"(# figure one
system = sys136
params.lambda1 = 11
params.lambda2 = 1
params.a1 = 1
params.a2 = 2
params.b = 0.1
params.c = 1e-1
grid.t0 = 0
grid.t1 = 40
grid.x0 = 0
grid.x1 = 2.5
grid.nt = 201
grid.nx = 101
family = eq134
family_params.C2 = 0.2
bc = theorem4
scheme = imex_cn
)";
  const Scenario s = scenario_from_config(parse_config_text(text));
  EXPECT_EQ(s.system_name, "sys136");
  EXPECT_EQ(expand(s.system()), (DlvParams{11, 1, 1, 2, -0.1, -0.1, -0.1, -0.1}));
  EXPECT_EQ(s.grid, (GridSpec{0, 40, 0, 2.5, 201, 101}));
  EXPECT_EQ(s.family, "eq134");
  EXPECT_DOUBLE_EQ(s.family_params.at("C2"), 0.2);
  EXPECT_EQ(s.bc, "theorem4");
  EXPECT_DOUBLE_EQ(s.all_params().at("C2"), 0.2);
  EXPECT_DOUBLE_EQ(s.all_params().at("lambda1"), 11.0);
}

TEST(Config, RejectsMalformed) {
  EXPECT_THROW(parse_config_text("system sys38"), ConfigError);
  EXPECT_THROW(scenario_from_config(parse_config_text("params.a1 = one")), ConfigError);
  EXPECT_THROW(scenario_from_config(parse_config_text("colour = red")), ConfigError);
  EXPECT_THROW(scenario_from_config(parse_config_text("grid.t0 = 1\ngrid.t1 = 0")), ConfigError);
  EXPECT_THROW(load_scenario("/nonexistent/file.cfg"), ConfigError);
}

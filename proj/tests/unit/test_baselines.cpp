#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "attrdisam/baselines.hpp"
#include "attrdisam/error.hpp"
#include "attrdisam/policy.hpp"
#include "support.hpp"

using namespace attrdisam;
using namespace testsupport;

namespace {

GroundingResult identical(std::size_t n) {
  return make_grounding(std::vector(n, one_hot(10, 1)), std::vector(n, one_hot(9, 4)));
}

std::uint64_t expected_point_only_expansions(std::uint64_t n, int depth) {
  std::uint64_t v = n;  // leaf: n grasps
  for (int d = 1; d <= depth; ++d) v = n + n * (1 + 2 * v);
  return v;
}

}  // namespace

TEST(RandSel, InRangeAndDeterministic) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int x = rand_sel(7, seed);
    EXPECT_GE(x, 0);
    EXPECT_LT(x, 7);
    EXPECT_EQ(x, rand_sel(7, seed));
  }
  EXPECT_EQ(rand_sel(1, 42), 0);
  EXPECT_THROW(rand_sel(0, 1), Error);
}

TEST(RandSel, Uniform) {
  const int n = 5;
  std::vector<int> counts(n, 0);
  const int trials = 10000;
  for (int s = 0; s < trials; ++s) ++counts[static_cast<std::size_t>(rand_sel(n, static_cast<std::uint64_t>(s)))];
  double chi2 = 0.0;
  const double e = trials / static_cast<double>(n);
  for (int c : counts) chi2 += (c - e) * (c - e) / e;
  EXPECT_LT(chi2, 18.467);  // chi-square, 4 dof, p = 0.001
}

TEST(RandAsk, GraspsAtThreshold) {
  BaselineConfig cfg;
  EXPECT_EQ(rand_ask_policy(belief_of({0.1, 0.8, 0.1}), cfg, 0, 1), Action::grasp(1));
  EXPECT_EQ(rand_ask_policy(belief_of({0.9, 0.1}), cfg, 0, 1), Action::grasp(0));
  EXPECT_TRUE(rand_ask_policy(belief_of({0.79, 0.21}), cfg, 0, 1).is_question());
}

TEST(RandAsk, GraspsWhenBudgetIsSpent) {
  BaselineConfig cfg;
  cfg.max_questions = 3;
  EXPECT_TRUE(rand_ask_policy(belief_of({0.5, 0.5}), cfg, 2, 9).is_question());
  EXPECT_EQ(rand_ask_policy(belief_of({0.4, 0.6}), cfg, 3, 9), Action::grasp(1));
}

TEST(RandAsk, QuestionsAreUniform) {
  BaselineConfig cfg;
  const Belief b = belief_of({0.3, 0.4, 0.3});
  int color = 0, loc = 0, point = 0;
  const int trials = 30000;
  for (int s = 0; s < trials; ++s) {
    const Action a = rand_ask_policy(b, cfg, 0, static_cast<std::uint64_t>(s));
    if (a == Action::ask_attr(Concept::Color)) ++color;
    else if (a == Action::ask_attr(Concept::Location)) ++loc;
    else if (a == Action::ask_point(1)) ++point;
    else ADD_FAILURE() << describe(a);
  }
  for (int c : {color, loc, point}) EXPECT_NEAR(c / static_cast<double>(trials), 1.0 / 3.0, 0.02);
}

TEST(BaselineConfig, Validation) {
  BaselineConfig c;
  c.max_questions = 0;
  EXPECT_THROW(c.validate(), Error);
  c = BaselineConfig{};
  c.belief_threshold = 1.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(PointOnly, TwoObjectsMatchClosedForm) {
  // One round of pointing at the argmax, then the best grasp.
  PlannerConfig cfg;
  cfg.depth = 1;
  const GroundingResult g = identical(2);
  const PlanResult r = point_only_pomdp_plan(belief_of({0.6, 0.4}), g, cfg);
  ASSERT_EQ(r.values.size(), 4u);
  const double t = 0.99;
  const double yes0 = 0.6 * t, yes1 = 0.4 * (1 - t);
  const double no0 = 0.6 * (1 - t), no1 = 0.4 * t;
  const double point0 = -0.3 + (std::max(yes0, yes1) * 2 - (yes0 + yes1)) +
                        (std::max(no0, no1) * 2 - (no0 + no1));
  EXPECT_NEAR(r.values[2].value, point0, 1e-12);
  EXPECT_NEAR(r.values[0].value, 0.2, 1e-12);
  EXPECT_EQ(r.action, Action::ask_point(0));
}

TEST(PointOnly, ExpansionsGrowWithObjects) {
  PlannerConfig cfg;
  std::mt19937_64 rng(1);
  for (std::size_t n : {2u, 5u, 10u}) {
    const PlanResult r = point_only_pomdp_plan(belief_of(random_belief(rng, n, false)), identical(n), cfg);
    EXPECT_EQ(r.expansions, expected_point_only_expansions(n, 3)) << n;
  }
  EXPECT_EQ(expected_point_only_expansions(5, 3), 6110u);
  EXPECT_GE(expected_point_only_expansions(10, 3) / static_cast<double>(expected_point_only_expansions(5, 3)),
            8.0);
}

TEST(PerObject, PolarQuestionsUseTheRowArgmax) {
  const GroundingResult g = make_grounding({{0.2, 0.8, 0, 0, 0, 0, 0, 0, 0, 0}, one_hot(10, 3)},
                                           {one_hot(9, 6), {0, 0.3, 0.7, 0, 0, 0, 0, 0, 0}});
  PerObjectAttrActionSpace space(g);
  std::vector<Action> acts;
  space.actions(std::vector<double>{0.5, 0.5}, acts);
  ASSERT_EQ(acts.size(), 2u + 4u + 2u);
  EXPECT_EQ(acts[2], Action::ask_obj_attr(0, Concept::Color, 1));
  EXPECT_EQ(acts[3], Action::ask_obj_attr(1, Concept::Color, 3));
  EXPECT_EQ(acts[4], Action::ask_obj_attr(0, Concept::Location, 6));
  EXPECT_EQ(acts[5], Action::ask_obj_attr(1, Concept::Location, 2));
  EXPECT_EQ(acts[6], Action::ask_point(0));
}

TEST(PerObject, DistinctColorsBeatPointing) {
  const GroundingResult g = make_grounding({one_hot(10, 0), one_hot(10, 1), one_hot(10, 2)},
                                           std::vector(3, one_hot(9, 4)));
  const PlanResult r = per_object_attr_pomdp_plan(belief_of({1.0 / 3, 1.0 / 3, 1.0 / 3}), g, PlannerConfig{});
  EXPECT_EQ(r.action.kind, ActionKind::AskObjAttr);
}

TEST(Spaces, IdenticalRowsLeavePointingAsTheOnlyUsefulQuestion) {
  PlannerConfig cfg;
  const GroundingResult g = identical(3);
  const Belief b = belief_of({1.0 / 3, 1.0 / 3, 1.0 / 3});
  const PlanResult attr = plan(b, g, cfg);
  const PlanResult point = point_only_pomdp_plan(b, g, cfg);
  EXPECT_EQ(attr.action, Action::ask_point(0));
  // AskAttr is useless here, so the attribute planner can only point at the
  // argmax while the point-only planner may point anywhere: its value is at
  // least as high.
  EXPECT_GE(point.value + 1e-12, attr.value);
}

TEST(Policies, NamesAndFactory) {
  const auto names = policy_names();
  ASSERT_EQ(names.size(), 5u);
  for (auto name : names) {
    const auto p = make_policy(name, PlannerConfig{}, BaselineConfig{});
    EXPECT_EQ(p->name(), name);
  }
  try {
    make_policy("oracle", PlannerConfig{}, BaselineConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
    EXPECT_NE(std::string(e.what()).find("attr_pomdp"), std::string::npos);
  }
}

TEST(Policies, BudgetForcesGraspForSearchBaselines) {
  BaselineConfig baseline;
  baseline.max_questions = 2;
  const GroundingResult g = identical(3);
  const Belief b = belief_of({0.2, 0.5, 0.3});
  for (const char* name : {"point_only", "per_object_attr", "rand_ask"}) {
    const auto p = make_policy(name, PlannerConfig{}, baseline);
    EXPECT_TRUE(p->decide({b, g, 0, 1}).action.is_question()) << name;
    EXPECT_EQ(p->decide({b, g, 2, 1}).action, Action::grasp(1)) << name;
  }
}

TEST(Policies, RandSelNeverAsks) {
  const auto p = make_policy("rand_sel", PlannerConfig{}, BaselineConfig{});
  const GroundingResult g = identical(4);
  const Belief b = belief_of({0.25, 0.25, 0.25, 0.25});
  for (std::uint64_t s = 0; s < 20; ++s) EXPECT_EQ(p->decide({b, g, 0, s}).action.kind, ActionKind::Grasp);
}

TEST(Policies, AttrPomdpReportsExpansions) {
  const auto p = make_policy("attr_pomdp", PlannerConfig{}, BaselineConfig{});
  const GroundingResult g = identical(4);
  const Belief b = belief_of({0.25, 0.25, 0.25, 0.25});
  EXPECT_EQ(p->decide({b, g, 0, 0}).expansions, 11113u);
}

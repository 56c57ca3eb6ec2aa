#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>

#include "attrdisam/error.hpp"
#include "attrdisam/grounding.hpp"
#include "support.hpp"

using namespace attrdisam;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an attrdisam::Error";
  return ErrorKind::Io;
}

double row_sum(std::span<const double> r) { return std::accumulate(r.begin(), r.end(), 0.0); }

Scene unambiguous_scene(std::uint64_t seed) {
  SceneGenConfig c;
  c.ambiguity = AmbiguityClass::Unambiguous;
  return generate_scene(c, seed);
}

}  // namespace

TEST(ColorStateVector, Examples) {
  std::array<double, 10> one{1, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  auto r = color_state_vector(one);
  EXPECT_FALSE(r.degenerate);
  EXPECT_EQ(r.values[0], 1.0);
  EXPECT_EQ(row_sum(r.values), 1.0);

  std::array<double, 10> two{0.8, 0.8, 0, 0, 0, 0, 0, 0, 0, 0};
  r = color_state_vector(two);
  EXPECT_DOUBLE_EQ(r.values[0], 0.5);
  EXPECT_DOUBLE_EQ(r.values[1], 0.5);
  EXPECT_EQ(r.values[2], 0.0);
}

TEST(ColorStateVector, DegenerateInputFallsBackToUniform) {
  std::array<double, 10> zero{};
  auto r = color_state_vector(zero);
  EXPECT_TRUE(r.degenerate);
  for (double v : r.values) EXPECT_DOUBLE_EQ(v, 0.1);

  std::array<double, 10> tiny{};
  tiny[3] = 1e-13;
  EXPECT_TRUE(color_state_vector(tiny).degenerate);
}

TEST(LocationStateVector, Examples) {
  const auto flat = location_state_vector({0.3, 0.8}, 1e-9);
  for (double v : flat) EXPECT_NEAR(v, 1.0 / 9, 1e-8);

  const auto sharp = location_state_vector({1.0 / 6, 1.0 / 6}, 10.0);
  EXPECT_EQ(std::max_element(sharp.begin(), sharp.end()) - sharp.begin(), 0);

  // 1 / (1 + 4 exp(-5/3) + 4 exp(-5 sqrt(2) / 3)), evaluated at 30 digits.
  const auto mid = location_state_vector({0.5, 0.5}, 5.0);
  EXPECT_NEAR(mid[4], 0.468535611550296781, 1e-15);
  EXPECT_NEAR(row_sum(mid), 1.0, 1e-15);
  for (double v : mid) EXPECT_GT(v, 0.0);
}

TEST(LocationStateVector, Errors) {
  EXPECT_EQ(kind_of([] { location_state_vector({1.2, 0.5}, 5.0); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([] { location_state_vector({0.5, 0.5}, 0.0); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([] { location_state_vector({0.5, 0.5}, -1.0); }), ErrorKind::Domain);
}

TEST(LocationStateVector, ArgmaxIsNearestCell) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const Point p{u(rng), u(rng)};
    const auto v = location_state_vector(p, 5.0);
    EXPECT_EQ(static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin()), nearest_cell(p));
  }
}

// Walking straight toward a cell center never lowers that cell's probability.
TEST(LocationStateVector, MonotoneTowardCellCenter) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Point start{u(rng), u(rng)};
    const std::size_t k = static_cast<std::size_t>(trial % 9);
    const Point goal = LocationGrid::cell_centers[k];
    double prev = 0.0;
    for (int step = 0; step <= 20; ++step) {
      const double t = step / 20.0;
      const Point p{start.x + t * (goal.x - start.x), start.y + t * (goal.y - start.y)};
      const double pk = location_state_vector(p, 5.0)[k];
      EXPECT_GE(pk, prev - 1e-12);
      prev = pk;
    }
  }
}

TEST(ParseQuery, Templates) {
  const std::vector<std::string> cats{"cup", "apple", "can"};
  auto q = parse_query("the red cup", cats);
  EXPECT_EQ(q.color, 0u);
  EXPECT_EQ(q.category, "cup");
  EXPECT_FALSE(q.cell);

  q = parse_query("the cup on the top-left", cats);
  EXPECT_EQ(q.category, "cup");
  EXPECT_EQ(q.cell, 0u);

  q = parse_query("The Apple, on the bottom right!", cats);
  EXPECT_EQ(q.category, "apple");
  EXPECT_EQ(q.cell, 8u);

  q = parse_query("the can left of the cup", cats);
  EXPECT_EQ(q.category, "can");
  EXPECT_EQ(q.relation, QueryParse::Relation::LeftOf);
  EXPECT_EQ(q.anchor_category, "cup");

  EXPECT_TRUE(parse_query("", cats).empty());
  EXPECT_TRUE(parse_query("that thing", cats).empty());
}

TEST(SimulateGrounding, ZeroNoiseUnambiguousTargetScoresHighest) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Scene s = unambiguous_scene(seed);
    const auto g = simulate_grounding(s, NoiseConfig{}.without_noise(), seed);
    const auto t = static_cast<std::size_t>(s.target_id);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i != t) EXPECT_GT(g.scores[t], g.scores[i]);
    }
  }
}

TEST(SimulateGrounding, ZeroNoiseLocationAndRelationQueries) {
  SceneGenConfig c;
  c.ambiguity = AmbiguityClass::Unambiguous;
  c.location_query_prob = 1.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Scene s = generate_scene(c, seed);
    const auto g = simulate_grounding(s, NoiseConfig{}.without_noise(), 0);
    const auto best = *std::max_element(g.scores.begin(), g.scores.end());
    EXPECT_EQ(g.scores[static_cast<std::size_t>(s.target_id)], best);
    EXPECT_EQ(std::count(g.scores.begin(), g.scores.end(), best), 1);
  }
}

TEST(SimulateGrounding, EmptyQueryGivesEqualScores) {
  SceneGenConfig c;
  c.ambiguity = AmbiguityClass::NoPrior;
  const Scene s = generate_scene(c, 4);
  for (double sigma : {0.0, 0.15, 0.5}) {
    NoiseConfig n;
    n.score_sigma = sigma;
    const auto g = simulate_grounding(s, n, 99);
    for (double v : g.scores) EXPECT_EQ(v, g.scores[0]);
  }
}

TEST(SimulateGrounding, ZeroNoiseOneHotRowsStayOneHot) {
  SceneGenConfig c;
  c.multi_color_prob = 0.0;
  const Scene s = generate_scene(c, 8);
  const auto g = simulate_grounding(s, NoiseConfig{}.without_noise(), 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t k = 0; k < kNumColors; ++k) EXPECT_EQ(g.color_matrix.at(i, k), s.objects[i].color_dist[k]);
  }
}

TEST(SimulateGrounding, ZeroNoiseIsSeedIndependent) {
  const Scene s = generate_scene(SceneGenConfig{}, 12);
  const auto quiet = NoiseConfig{}.without_noise();
  EXPECT_EQ(simulate_grounding(s, quiet, 1), simulate_grounding(s, quiet, 2));
}

TEST(SimulateGrounding, NoisyIsDeterministicInSeed) {
  const Scene s = generate_scene(SceneGenConfig{}, 12);
  EXPECT_EQ(simulate_grounding(s, NoiseConfig{}, 5), simulate_grounding(s, NoiseConfig{}, 5));
  EXPECT_NE(simulate_grounding(s, NoiseConfig{}, 5), simulate_grounding(s, NoiseConfig{}, 6));
}

TEST(SimulateGrounding, RowsOnSimplexAndScoresClamped) {
  NoiseConfig loud;
  loud.score_sigma = 2.0;
  loud.dirichlet_kappa = 2.0;
  loud.location_sigma = 0.3;
  SceneGenConfig c;
  c.multi_color_prob = 0.6;
  bool saw_negative = false;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    c.ambiguity = static_cast<AmbiguityClass>(seed % 3);
    const auto g = simulate_grounding(generate_scene(c, seed), loud, seed);
    ASSERT_NO_THROW(validate(g));
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_NEAR(row_sum(g.color_matrix.row(i)), 1.0, 1e-9);
      EXPECT_NEAR(row_sum(g.loc_matrix.row(i)), 1.0, 1e-9);
      EXPECT_GE(g.scores[i], -1.0);
      EXPECT_LE(g.scores[i], 1.0);
      saw_negative = saw_negative || g.scores[i] < 0.0;
    }
  }
  EXPECT_TRUE(saw_negative);
}

TEST(SimulateGrounding, MoreNoiseNeverHelpsRankOneAccuracy) {
  std::vector<int> hits;
  for (double sigma : {0.1, 0.4, 0.8}) {
    NoiseConfig n;
    n.score_sigma = sigma;
    int h = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const Scene s = unambiguous_scene(seed);
      const auto g = simulate_grounding(s, n, seed);
      const auto best = std::max_element(g.scores.begin(), g.scores.end()) - g.scores.begin();
      h += best == s.target_id ? 1 : 0;
    }
    hits.push_back(h);
  }
  EXPECT_GE(hits[0], hits[1]);
  EXPECT_GE(hits[1], hits[2]);
  EXPECT_GT(hits[0], hits[2]);
}

TEST(GroundingJson, RoundTrip) {
  const Scene s = generate_scene(SceneGenConfig{}, 3);
  const auto g = simulate_grounding(s, NoiseConfig{}, 3);
  EXPECT_EQ(grounding_from_json(to_json(g)), g);
  const auto path = std::filesystem::temp_directory_path() / "attrdisam_grounding_rt.json";
  save_grounding(g, path);
  EXPECT_EQ(load_grounding(path), g);
  std::filesystem::remove(path);
}

TEST(GroundingJson, ToleranceRule) {
  using testsupport::make_grounding;
  using testsupport::one_hot;
  auto j = to_json(make_grounding({one_hot(10, 0), one_hot(10, 1)}, {one_hot(9, 0), one_hot(9, 1)}));

  j["color_matrix"][0][0] = 1.0000005;
  const auto ok = grounding_from_json(j);
  EXPECT_NEAR(row_sum(ok.color_matrix.row(0)), 1.0, 1e-15);

  j["color_matrix"][0][0] = 0.8;
  EXPECT_EQ(kind_of([&] { grounding_from_json(j); }), ErrorKind::Validation);

  j["color_matrix"][0][0] = -0.1;
  j["color_matrix"][0][1] = 1.1;
  EXPECT_EQ(kind_of([&] { grounding_from_json(j); }), ErrorKind::Validation);
}

TEST(GroundingJson, SchemaErrors) {
  using testsupport::make_grounding;
  using testsupport::one_hot;
  const auto base = to_json(make_grounding({one_hot(10, 0)}, {one_hot(9, 0)}));

  auto j = base;
  j.erase("scores");
  EXPECT_EQ(kind_of([&] { grounding_from_json(j); }), ErrorKind::Schema);

  j = base;
  j["loc_matrix"][0].erase(8);
  EXPECT_EQ(kind_of([&] { grounding_from_json(j); }), ErrorKind::Schema);

  j = base;
  j["scores"] = {0.1, 0.2};
  EXPECT_NE(kind_of([&] { grounding_from_json(j); }), ErrorKind::Io);

  j = base;
  j["scores"][0] = "high";
  EXPECT_EQ(kind_of([&] { grounding_from_json(j); }), ErrorKind::Schema);
}

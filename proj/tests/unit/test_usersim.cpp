#include <gtest/gtest.h>

#include <cctype>
#include <cmath>
#include <random>

#include "attrdisam/error.hpp"
#include "attrdisam/usersim.hpp"
#include "support.hpp"

using namespace attrdisam;

namespace {

Scene colorful_scene(std::uint64_t seed) {
  SceneGenConfig c;
  c.n_objects = 6;
  c.multi_color_prob = 0.6;
  return generate_scene(c, seed);
}

// Total variation between the empirical answer frequencies and the model.
double answer_tv(const Scene& scene, const GroundingResult& g, const Action& a, const UserModel& user,
                 int samples, std::uint64_t seed) {
  const auto obs = observation_space(a);
  std::vector<int> counts(obs.size(), 0);
  Rng rng = make_rng(seed, Stream::User);
  for (int i = 0; i < samples; ++i) {
    const Observation o = respond(scene, a, user, rng);
    for (std::size_t k = 0; k < obs.size(); ++k) {
      if (obs[k] == o) ++counts[k];
    }
  }
  double tv = 0.0;
  const auto target = static_cast<std::size_t>(scene.target_id);
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const double model = observation_prob(g, target, a, obs[k], user.truthfulness);
    tv += std::abs(counts[k] / static_cast<double>(samples) - model);
  }
  return tv / 2.0;
}

}  // namespace

TEST(Respond, ColorAnswersFollowTheTargetDistribution) {
  const UserModel user;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Scene s = colorful_scene(seed);
    const GroundingResult g = simulate_grounding(s, NoiseConfig{}.without_noise(), 0);
    EXPECT_LT(answer_tv(s, g, Action::ask_attr(Concept::Color), user, 100000, seed), 0.01);
  }
}

TEST(Respond, PointingAnswersMatchTruthfulness) {
  const UserModel user;
  const Scene s = colorful_scene(3);
  const GroundingResult g = simulate_grounding(s, NoiseConfig{}.without_noise(), 0);
  for (int obj = 0; obj < 2; ++obj) {
    EXPECT_LT(answer_tv(s, g, Action::ask_point(obj), user, 100000, 40 + obj), 0.005);
  }
}

TEST(Respond, SampledLocationsMatchTheSoftmaxRows) {
  UserModel user;
  user.location_mode = LocationResponseMode::SampleSoftmax;
  const Scene s = colorful_scene(8);
  const GroundingResult g = simulate_grounding(s, NoiseConfig{}.without_noise(), 0);
  EXPECT_LT(answer_tv(s, g, Action::ask_attr(Concept::Location), user, 100000, 2), 0.01);
}

TEST(Respond, NearestCellModeIsDeterministic) {
  const UserModel user;
  const Scene s = colorful_scene(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Observation o = respond(s, Action::ask_attr(Concept::Location), user, seed);
    EXPECT_EQ(o.value, static_cast<int>(nearest_cell(s.target().center)));
  }
}

TEST(Respond, ArgmaxColorMode) {
  UserModel user;
  user.color_mode = ColorResponseMode::ArgmaxTrueDist;
  const Scene s = colorful_scene(5);
  const auto& d = s.target().color_dist;
  const auto best = std::max_element(d.begin(), d.end()) - d.begin();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_EQ(respond(s, Action::ask_attr(Concept::Color), user, seed).value, best);
  }
}

TEST(Respond, SameSeedSameAnswer) {
  const Scene s = colorful_scene(6);
  const UserModel user;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_EQ(respond(s, Action::ask_attr(Concept::Color), user, seed),
              respond(s, Action::ask_attr(Concept::Color), user, seed));
  }
}

TEST(Respond, GraspIsNotAQuestion) {
  const Scene s = colorful_scene(1);
  try {
    respond(s, Action::grasp(0), UserModel{}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(UserModel, Validation) {
  UserModel u;
  u.truthfulness = 0.3;
  EXPECT_THROW(u.validate(), Error);
  u = UserModel{};
  u.location_lambda = -1.0;
  EXPECT_THROW(u.validate(), Error);
}

TEST(ParseResponse, Examples) {
  const UserModel user;
  const Action color = Action::ask_attr(Concept::Color);
  EXPECT_EQ(parse_response("it's red", color, user), Observation::attr_word(Concept::Color, 0));
  EXPECT_EQ(parse_response("The BLUE one.", color, user), Observation::attr_word(Concept::Color, 2));
  EXPECT_EQ(parse_response("purple dinosaur", color, user), Observation::attr_word(Concept::Color, 5));
  EXPECT_FALSE(parse_response("a dinosaur", color, user).has_value());

  const Action loc = Action::ask_attr(Concept::Location);
  EXPECT_EQ(parse_response("top left", loc, user)->value, 0);
  EXPECT_EQ(parse_response("bottom-right corner", loc, user)->value, 8);
  EXPECT_EQ(parse_response("in the middle", loc, user)->value, 4);

  const Action point = Action::ask_point(0);
  EXPECT_EQ(parse_response("Yes!", point, user), Observation::polar(true));
  EXPECT_EQ(parse_response("nope", point, user), Observation::polar(false));
  EXPECT_FALSE(parse_response("maybe", point, user).has_value());
}

TEST(ParseResponse, FirstKeywordWins) {
  const UserModel user;
  EXPECT_EQ(parse_response("red, no wait, green", Action::ask_attr(Concept::Color), user)->value, 0);
  EXPECT_EQ(parse_response("no... yes", Action::ask_point(1), user), Observation::polar(false));
  EXPECT_EQ(parse_response("yes, not that one", Action::ask_point(1), user), Observation::polar(true));
}

TEST(ParseResponse, CaseAndPunctuationDoNotMatter) {
  const UserModel user;
  std::mt19937_64 rng(2);
  const std::string punct = ".,!?;: ";
  const Action color = Action::ask_attr(Concept::Color);
  for (std::size_t c = 0; c < kNumColors; ++c) {
    std::string word(ColorVocab::values[c]);
    for (int trial = 0; trial < 20; ++trial) {
      std::string text;
      for (char ch : word) {
        text += rng() % 2 ? static_cast<char>(std::toupper(static_cast<unsigned char>(ch))) : ch;
      }
      text = std::string(1, punct[rng() % punct.size()]) + text + punct[rng() % punct.size()];
      const auto o = parse_response(text, color, user);
      ASSERT_TRUE(o.has_value()) << text;
      EXPECT_EQ(o->value, static_cast<int>(c)) << text;
    }
  }
}

TEST(ParseResponse, ResultIsCompatibleWithTheQuestion) {
  const UserModel user;
  const GroundingResult g = testsupport::make_grounding({testsupport::one_hot(10, 0)},
                                                        {testsupport::one_hot(9, 0)});
  for (const std::string text : {"red", "top left", "yes", "no", "left", "white right"}) {
    for (const Action& a : {Action::ask_attr(Concept::Color), Action::ask_attr(Concept::Location),
                            Action::ask_point(0)}) {
      if (const auto o = parse_response(text, a, user)) {
        EXPECT_NO_THROW(observation_prob(g, 0, a, *o, 0.99)) << text;
      }
    }
  }
}

TEST(ParseResponse, CustomPolarWords) {
  UserModel user;
  user.positive_words = {"oui"};
  user.negative_words = {"non"};
  EXPECT_EQ(parse_response("oui", Action::ask_point(0), user), Observation::polar(true));
  EXPECT_FALSE(parse_response("yes", Action::ask_point(0), user).has_value());
}

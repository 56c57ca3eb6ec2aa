#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "attrdisam/config.hpp"
#include "attrdisam/error.hpp"

using namespace attrdisam;

namespace {

std::string config_error(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "expected a config error";
  return {};
}

}  // namespace

TEST(Settings, DefaultsAreValid) {
  Settings s;
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.planner.depth, 3);
  EXPECT_DOUBLE_EQ(s.planner.rewards.ask_point, -0.3);
  EXPECT_EQ(s.baseline.max_questions, 5);
}

TEST(Settings, FlatText) {
  Settings s;
  apply_settings_text(s, R"(# comment
depth = 2
reward.ask_point = -0.5   # trailing comment
lambda = 4
truthfulness = 0.95
user.color_mode = argmax
scene.colors = red, blue
)");
  EXPECT_EQ(s.planner.depth, 2);
  EXPECT_DOUBLE_EQ(s.planner.rewards.ask_point, -0.5);
  EXPECT_DOUBLE_EQ(s.noise.lambda, 4.0);
  EXPECT_DOUBLE_EQ(s.user.location_lambda, 4.0);
  EXPECT_DOUBLE_EQ(s.planner.truthfulness, 0.95);
  EXPECT_DOUBLE_EQ(s.user.truthfulness, 0.95);
  EXPECT_EQ(s.user.color_mode, ColorResponseMode::ArgmaxTrueDist);
  EXPECT_EQ(s.scene.colors, (std::vector<std::string>{"red", "blue"}));
}

TEST(Settings, NestedJson) {
  Settings s;
  apply_settings_text(s, R"({"reward": {"ask_point": -0.5}, "noise": {"weight": {"subject": 0.7}},
                             "scene": {"categories": ["mug", "bowl"]}, "threads": 2})");
  EXPECT_DOUBLE_EQ(s.planner.rewards.ask_point, -0.5);
  EXPECT_DOUBLE_EQ(s.noise.weights.subject, 0.7);
  EXPECT_EQ(s.scene.categories, (std::vector<std::string>{"mug", "bowl"}));
  EXPECT_EQ(s.threads, 2u);
}

TEST(Settings, Errors) {
  Settings s;
  EXPECT_NE(config_error([&] { apply_setting(s, "foo", "1"); }).find("unknown config key 'foo'"),
            std::string::npos);
  EXPECT_NE(config_error([&] { apply_setting(s, "depth", "three"); }).find("depth"), std::string::npos);
  EXPECT_NE(config_error([&] { apply_settings_text(s, "depth = 2\nbogus line\n", "f.cfg"); }).find("f.cfg:2"),
            std::string::npos);
  config_error([&] { apply_settings_text(s, "{\"depth\": ", "x"); });
  config_error([&] { apply_setting(s, "user.color_mode", "psychic"); });
  config_error([] { load_settings("/nonexistent/attrdisam.cfg"); });
}

TEST(Settings, LoadValidates) {
  const auto path = std::filesystem::temp_directory_path() / "attrdisam_config_test.cfg";
  {
    std::ofstream(path) << "truthfulness = 0.2\n";
  }
  config_error([&] { load_settings(path); });
  {
    std::ofstream(path) << "{\"baseline\": {\"n_q\": 3}}";
  }
  EXPECT_EQ(load_settings(path).baseline.max_questions, 3);
  std::filesystem::remove(path);
}

TEST(Settings, EveryKeyRoundTrips) {
  const Settings defaults;
  const auto j = to_json(defaults);
  const auto keys = setting_keys();
  EXPECT_GT(keys.size(), 40u);
  for (const auto& key : keys) {
    ASSERT_TRUE(j.contains(key)) << key;
    Settings s;
    const auto& v = j[key];
    std::string text = v.is_string() ? v.get<std::string>() : v.dump();
    if (v.is_array()) {
      text.clear();
      for (const auto& item : v) text += (text.empty() ? "" : ",") + item.get<std::string>();
    }
    EXPECT_NO_THROW(apply_setting(s, key, text)) << key << " = " << text;
    EXPECT_EQ(to_json(s), j) << key;
  }
}

TEST(Settings, ViewsCarryValues) {
  Settings s;
  apply_setting(s, "step_limit", "7");
  apply_setting(s, "baseline.n_q", "2");
  EXPECT_EQ(s.bench().step_limit, 7);
  EXPECT_EQ(s.bench().baseline.max_questions, 2);
  EXPECT_EQ(s.session().step_limit, 7);
}

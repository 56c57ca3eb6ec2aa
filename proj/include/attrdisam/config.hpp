#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "attrdisam/bench.hpp"
#include "attrdisam/session.hpp"

namespace attrdisam {

/// Every tunable of the system in one place. Files may be flat `key = value`
/// lines (with `#` comments) or JSON objects whose nesting maps onto dotted
/// keys, so {"reward": {"ask_point": -0.5}} equals `reward.ask_point = -0.5`.
struct Settings {
  NoiseConfig noise;
  PlannerConfig planner;
  BaselineConfig baseline;
  UserModel user;
  SceneGenConfig scene;
  SuiteConfig suite;
  int step_limit = kDefaultStepLimit;
  unsigned threads = 0;

  BenchSettings bench() const;
  SessionSettings session() const;
  /// Throws Error{Config} when any component is out of range.
  void validate() const;
};

/// Sets one key. Throws Error{Config} for unknown keys or malformed values.
void apply_setting(Settings& s, std::string_view key, std::string_view value);

/// Applies a flat or JSON document on top of `s`.
void apply_settings_text(Settings& s, std::string_view text, std::string_view origin = "config");
void apply_settings_json(Settings& s, const nlohmann::json& j);

Settings load_settings(const std::filesystem::path& path);

/// All recognised keys in documentation order.
std::vector<std::string> setting_keys();

/// Effective values of every key, as a flat JSON object.
nlohmann::json to_json(const Settings& s);

}  // namespace attrdisam

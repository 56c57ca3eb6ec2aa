#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "attrdisam/session.hpp"

namespace attrdisam {

/// Desk-scale suite: n objects drawn from [n_min, n_max] per scene and a
/// fixed ambiguity mix.
struct SuiteConfig {
  int n_scenes = 500;
  int n_min = 8;
  int n_max = 10;
  double frac_category_only = 0.5;
  double frac_no_prior = 0.25;
  double frac_unambiguous = 0.25;
  /// Template for every scene; n_objects and ambiguity are set per scene.
  SceneGenConfig scene;

  void validate() const;
};

struct SceneSuite {
  std::vector<Scene> scenes;
};

SceneSuite generate_suite(const SuiteConfig& config, std::uint64_t seed);
nlohmann::json to_json(const SceneSuite& suite);
SceneSuite suite_from_json(const nlohmann::json& j);
SceneSuite load_suite(const std::filesystem::path& path);
void save_suite(const SceneSuite& suite, const std::filesystem::path& path);

/// Everything an episode needs besides the scene.
struct BenchSettings {
  NoiseConfig noise;
  PlannerConfig planner;
  BaselineConfig baseline;
  UserModel user;
  int step_limit = kDefaultStepLimit;
  /// Worker threads for suite runs; 0 picks the hardware concurrency.
  unsigned threads = 0;

  EpisodeOptions episode_options() const;
};

struct PolicyRow {
  std::string policy;
  int n_episodes = 0;
  int n_correct = 0;
  double accuracy = 0.0;
  double mean_questions = 0.0;
  double mean_planning_ms = 0.0;
  double p95_planning_ms = 0.0;
};

struct BenchmarkReport {
  /// Sorted by accuracy, best first; ties keep the requested policy order.
  std::vector<PolicyRow> rows;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> records;
};

/// Seed of the i-th scene's episode; shared by every policy so the suite is
/// paired (same grounding noise and same user random stream).
std::uint64_t episode_seed(std::uint64_t suite_seed, std::size_t scene_index);

/// Runs every policy on every scene. Episode errors are rethrown with the
/// scene index attached.
BenchmarkReport run_suite(const SceneSuite& suite, std::span<const std::string> policies,
                          const BenchSettings& settings, std::uint64_t seed);

/// Per-policy rows from episode records; the result does not depend on the
/// order of `records`.
std::vector<PolicyRow> aggregate(std::vector<EpisodeRecord> records,
                                 std::span<const std::string> policies);

/// CSV with header policy,n_episodes,accuracy,mean_questions,mean_planning_ms,p95_planning_ms.
/// Without timing the two wall-clock columns are left empty so reruns match
/// byte for byte.
std::string to_csv(const BenchmarkReport& report, bool include_timing);
nlohmann::json to_json(const BenchmarkReport& report, bool include_timing);
std::string records_jsonl(const BenchmarkReport& report, bool include_timing);

struct ScalingRow {
  int n = 0;
  std::string policy;
  int n_decisions = 0;
  double mean_expansions = 0.0;
  double mean_planning_ms = 0.0;
};

/// First-decision cost of each policy on no-prior scenes of each size.
std::vector<ScalingRow> scaling_experiment(std::span<const int> n_values,
                                           std::span<const std::string> policies,
                                           const BenchSettings& settings, std::uint64_t seed,
                                           int scenes_per_n = 5);
std::string scaling_to_csv(std::span<const ScalingRow> rows, bool include_timing);
nlohmann::json scaling_to_json(std::span<const ScalingRow> rows, bool include_timing);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace attrdisam

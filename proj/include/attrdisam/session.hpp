#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "attrdisam/grounding.hpp"
#include "attrdisam/policy.hpp"
#include "attrdisam/pomdp.hpp"
#include "attrdisam/scene.hpp"
#include "attrdisam/usersim.hpp"

namespace attrdisam {

inline constexpr int kDefaultStepLimit = 50;

struct EpisodeOptions {
  /// Truthfulness the agent assumes when updating its belief.
  double model_truthfulness = 0.99;
  RewardModel rewards;
  int step_limit = kDefaultStepLimit;
};

struct EpisodeStep {
  /// Belief the action was chosen from.
  Belief belief;
  Action action;
  std::optional<Observation> observation;
  double reward = 0.0;
  double planning_ms = 0.0;
  std::uint64_t expansions = 0;
  bool zero_evidence = false;
};

struct EpisodeRecord {
  std::string scene_ref;
  std::string policy;
  std::vector<EpisodeStep> steps;
  bool correct = false;
  int grasped = -1;
  int target_id = -1;
  int n_questions = 0;
  double total_reward = 0.0;
  std::uint64_t seed = 0;
  /// A zero-evidence observation was met and treated as uninformative.
  bool flagged = false;
};

/// One episode of the ask/update loop with a simulated user. Fully
/// determined by the inputs and `seed`; throws Error{StepLimitExceeded} when
/// no grasp happens within the step limit.
EpisodeRecord run_episode(const Scene& scene, const GroundingResult& grounding, const Policy& policy,
                          const UserModel& user, const EpisodeOptions& options, std::uint64_t seed);

/// Same, simulating the grounding from `noise` first.
EpisodeRecord run_episode(const Scene& scene, const NoiseConfig& noise, const Policy& policy,
                          const UserModel& user, const EpisodeOptions& options, std::uint64_t seed);

nlohmann::json to_json(const EpisodeRecord& record, bool include_timing);

/// The two attribute values with the highest belief-weighted probability.
std::array<std::size_t, 2> top_attribute_values(Concept c, const GroundingResult& g, const Belief& b);

/// Question text for an ask action, e.g. "what is the color of your target,
/// red or yellow?".
std::string render_question(const Action& a, const GroundingResult& g, const Belief& b);

/// Quick-reply options matching render_question.
std::vector<std::string> question_options(const Action& a, const GroundingResult& g, const Belief& b);

struct SessionSettings {
  SceneGenConfig scene;
  NoiseConfig noise;
  PlannerConfig planner;
  BaselineConfig baseline;
  UserModel user;
  int step_limit = kDefaultStepLimit;
};

/// Live sessions where a person plays the user. Sessions are independent;
/// answers to one session are serialized.
class SessionManager {
 public:
  explicit SessionManager(SessionSettings settings);
  ~SessionManager();

  /// Request: {"scene": {...}} or {"generator": {...}}, optional "seed",
  /// "grounding" and "policy".
  nlohmann::json start(const nlohmann::json& request);
  nlohmann::json answer(const std::string& session_id, std::string_view text);
  nlohmann::json history(const std::string& session_id) const;

  struct Session;

 private:
  std::shared_ptr<Session> find(const std::string& session_id) const;

  SessionSettings settings_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace attrdisam

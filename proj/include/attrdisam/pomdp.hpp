#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "attrdisam/grounding.hpp"

namespace attrdisam {

/// Distribution over candidate objects; `t` counts the updates applied.
struct Belief {
  std::vector<double> probs;
  int t = 0;

  std::size_t size() const noexcept { return probs.size(); }
  /// Most likely object; ties go to the lowest id.
  std::size_t argmax() const;

  friend bool operator==(const Belief&, const Belief&) = default;
};

/// Belief from matching scores: positive parts normalized, uniform when no
/// score is positive.
Belief init_belief(std::span<const double> scores);

enum class ActionKind {
  Grasp,
  AskAttr,
  AskPoint,
  /// Polar question "is the target <value>?" grounded in one object's
  /// attribute row. Only the per-object baseline planner issues it.
  AskObjAttr,
};

struct Action {
  ActionKind kind = ActionKind::Grasp;
  Concept attribute = Concept::Color;
  int object = 0;
  int value = 0;

  static Action grasp(int object) { return {ActionKind::Grasp, Concept::Color, object, 0}; }
  static Action ask_attr(Concept c) { return {ActionKind::AskAttr, c, 0, 0}; }
  static Action ask_point(int object) { return {ActionKind::AskPoint, Concept::Color, object, 0}; }
  static Action ask_obj_attr(int object, Concept c, int value) {
    return {ActionKind::AskObjAttr, c, object, value};
  }

  bool is_question() const noexcept { return kind != ActionKind::Grasp; }

  friend bool operator==(const Action&, const Action&) = default;
};

std::string describe(const Action& a);

enum class ObservationKind { AttrWord, Polar };

struct Observation {
  ObservationKind kind = ObservationKind::Polar;
  Concept attribute = Concept::Color;
  int value = 0;
  bool positive = false;

  static Observation attr_word(Concept c, int value) {
    return {ObservationKind::AttrWord, c, value, false};
  }
  static Observation polar(bool positive) {
    return {ObservationKind::Polar, Concept::Color, 0, positive};
  }

  friend bool operator==(const Observation&, const Observation&) = default;
};

std::string describe(const Observation& o);

struct RewardModel {
  double ask_attr = -0.1;
  double ask_point = -0.3;
  double grasp_correct = 1.0;
  double grasp_wrong = -1.0;

  /// Cost of a question; per-object attribute questions cost like AskAttr.
  double question_cost(const Action& a) const noexcept {
    return a.kind == ActionKind::AskPoint ? ask_point : ask_attr;
  }
  double grasp_reward(bool correct) const noexcept { return correct ? grasp_correct : grasp_wrong; }
};

struct PlannerConfig {
  int depth = 3;
  double discount = 1.0;
  double truthfulness = 0.99;
  /// 0 enumerates every observation at chance nodes; k > 0 averages k
  /// sampled observations instead.
  int observation_samples = 0;
  std::uint64_t sampling_seed = 0;
  RewardModel rewards;

  void validate() const;
};

/// p(o | x, a). Throws Error{IncompatibleObservation} when `o` cannot answer `a`.
double observation_prob(const GroundingResult& g, std::size_t x, const Action& a,
                        const Observation& o, double truthfulness);

/// Every observation a question can produce, in vocabulary order.
std::vector<Observation> observation_space(const Action& a);

struct BeliefUpdate {
  Belief belief;
  /// No object could have produced the observation; `belief` is unchanged.
  bool zero_evidence = false;
};

BeliefUpdate update_belief(const Belief& b, const GroundingResult& g, const Action& a,
                           const Observation& o, double truthfulness);

/// AskAttr(color), AskAttr(location), AskPoint(x_b) and Grasp(x_b), listed
/// in planner preference order (Grasp first).
std::vector<Action> action_space(const Belief& b);

/// The actions a belief-tree search may take at a node, in tie-break order:
/// on equal value the earlier action wins.
class ActionSpace {
 public:
  virtual ~ActionSpace() = default;
  virtual void actions(std::span<const double> belief, std::vector<Action>& out) const = 0;
  /// Actions allowed at the depth limit (the grasps).
  virtual void leaf_actions(std::span<const double> belief, std::vector<Action>& out) const = 0;
};

class AttrActionSpace final : public ActionSpace {
 public:
  void actions(std::span<const double> belief, std::vector<Action>& out) const override;
  void leaf_actions(std::span<const double> belief, std::vector<Action>& out) const override;
};

struct ActionValue {
  Action action;
  double value = 0.0;
};

struct PlanResult {
  Action action;
  double value = 0.0;
  /// Root action values in tie-break order.
  std::vector<ActionValue> values;
  /// Action nodes evaluated, leaves included.
  std::uint64_t expansions = 0;
};

/// Depth-limited expectimax over beliefs. Ask actions recurse over their
/// observations; at the horizon only grasps are allowed.
PlanResult search(const Belief& b, const GroundingResult& g, const PlannerConfig& cfg,
                  const ActionSpace& space);

/// Called with the belief of every decision node the search enters and the
/// remaining depth there, root excluded.
using NodeVisitor = std::function<void(std::span<const double> belief, int depth)>;

/// Same search, reporting each node to `visit`. Slower: leaf beliefs are
/// materialized so they can be observed.
PlanResult search(const Belief& b, const GroundingResult& g, const PlannerConfig& cfg,
                  const ActionSpace& space, const NodeVisitor& visit);

double expected_return(const Belief& b, const GroundingResult& g, const Action& a,
                       int depth_remaining, const PlannerConfig& cfg);
double expected_return(const Belief& b, const GroundingResult& g, const Action& a,
                       int depth_remaining, const PlannerConfig& cfg, const ActionSpace& space);

PlanResult plan(const Belief& b, const GroundingResult& g, const PlannerConfig& cfg);

nlohmann::json to_json(const Action& a);
Action action_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Observation& o);
Observation observation_from_json(const nlohmann::json& j);

}  // namespace attrdisam
